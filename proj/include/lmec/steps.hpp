//
// Project lmec - Copyright 2026 The lmec Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LMEC_STEPS_HPP_
#define LMEC_STEPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "lmec/krylov.hpp"
#include "lmec/linear_operator.hpp"
#include "lmec/problem.hpp"
#include "lmec/vec.hpp"

namespace lmec {

/// Inner-solver tolerances and Cauchy-fraction safeguards for the step
/// computations.  The xi constants are certification constants recorded with
/// the step results; they are not enforced at runtime.
struct StepConfig {
  double cg_tol_floor = 1e-4;
  double cg_tol_rel = 1e-8;
  double cg_tol_abs_floor = 1e-15;
  int cg_max_iter = 1000;
  double xi0 = 1.0;
  double xi1 = 1.0;
  double xi2 = 1.0;
  double kappa1 = 1e-4;
  double kappa2 = 1e-4;

  void validate() const {
    if (!(cg_tol_floor > 0) || !(cg_tol_rel > 0) || !(cg_tol_abs_floor > 0) || cg_max_iter <= 0 ||
        !(xi0 > 0) || !(xi1 > 0) || !(xi2 > 0) || !(kappa1 > 0) || !(kappa2 > 0))
      throw std::invalid_argument("StepConfig: all fields must be positive");
  }
};

struct NormalStepResult {
  Vec n;
  double pred_c = 0.0;  // m_c(0) - m_c(n), recomputed exactly from n
  int cg_iterations = 0;
  bool cauchy_fallback_used = false;
  /// Set when C != 0 but jC^T C ~ 0: no step can satisfy the decrease
  /// condition at an infeasible stationary point of the violation; the
  /// solver logs and continues.
  bool gradient_degenerate = false;
};

struct TangentialStepResult {
  Vec t_tilde;  // inexact tangential step (approximately in null(jC))
  Vec t;        // re-projected step; filled by recover_step
  Vec g;        // Lagrangian model gradient at n
  Vec g_hat;    // projected gradient W~(g)
  Vec w_n;      // W~(n), needed for the pred_l correction term
  double pred_t = 0.0;
  // Achieved residuals of the three projection solves (g, n, t_tilde).
  double residual_ghat = 0.0;
  double residual_wn = 0.0;
  double residual_t = 0.0;
  int cg_iterations = 0;
  int minres_iterations = 0;  // total over all projection solves
  bool cauchy_fallback_used = false;
};

/// Minimizer of the normal model along -jC^T C (closed form).
inline Vec cauchy_point_normal(const IterateState& state, double gamma) {
  Vec w = state.jC.apply_adjoint(state.C);
  const double w2 = dot(w, w);
  if (w2 == 0.0) return zeros(state.x.size());
  Vec jw = state.jC.apply(w);
  const double denom = dot(jw, jw) + gamma * w2;
  if (denom <= 0.0) return zeros(state.x.size());
  scale(w, -w2 / denom);
  return w;
}

namespace detail {

inline double normal_model_decrease(const IterateState& state, const Vec& n, double gamma) {
  // m_c(0) - m_c(n) = -<C, jC n> - 0.5||jC n||^2 - 0.5 gamma ||n||^2,
  // written in the cancellation-free form.
  Vec u = state.jC.apply(n);
  return -dot(state.C, u) - 0.5 * dot(u, u) - 0.5 * gamma * dot(n, n);
}

}  // namespace detail

/// Inexact quasi-normal step: CG from zero on (jC^T jC + gamma I) n = -jC^T C
/// with the one-step-residual tolerance recipe.  If the achieved decrease
/// falls short of the kappa1 Cauchy fraction, the Cauchy point is used
/// instead.
inline NormalStepResult quasi_normal_step(const IterateState& state, double gamma,
                                          const StepConfig& cfg) {
  // gamma = 0 is the Gauss-Newton path: the normal system is singular but
  // consistent, and CG from zero still returns the minimum-norm solution.
  if (gamma < 0.0) throw std::invalid_argument("quasi_normal_step: gamma must be nonnegative");
  NormalStepResult result;
  const std::size_t d = state.x.size();
  result.n = zeros(d);
  if (norm(state.C) == 0.0) return result;

  const LinearOperator A = regularized_normal_operator(state.jC, gamma);
  Vec rhs = scaled(state.jC.apply_adjoint(state.C), -1.0);
  if (norm(rhs) == 0.0) {
    // Infeasible stationary point of phi: the decrease condition is
    // unattainable; return the zero step and flag it.
    result.gradient_degenerate = true;
    return result;
  }

  const double seed = cg_residual_after_one_step(A, rhs);
  const double tol = krylov_tolerance(seed, cfg.cg_tol_floor, cfg.cg_tol_abs_floor, cfg.cg_tol_rel);
  KrylovResult cg = cg_solve(A, rhs, tol, cfg.cg_max_iter);
  result.n = cg.solution;
  result.cg_iterations = cg.iterations;
  result.pred_c = detail::normal_model_decrease(state, result.n, gamma);

  const double jc_norm = state.jc_norm_estimate();
  const double required = cfg.kappa1 * dot(state.C, state.C) / (jc_norm * jc_norm + gamma);
  if (result.pred_c < required) {
    Vec nc = cauchy_point_normal(state, gamma);
    const double pred_cauchy = detail::normal_model_decrease(state, nc, gamma);
    if (pred_cauchy > result.pred_c) {
      result.n = nc;
      result.pred_c = pred_cauchy;
      result.cauchy_fallback_used = true;
    }
    if (result.pred_c < required) result.gradient_degenerate = true;
  }
  result.pred_c = std::max(result.pred_c, 0.0);
  return result;
}

struct ProjectionResult {
  Vec projected;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Applies the approximate nullspace projector W~ by a MINRES solve of the
/// saddle-point system [[I, jC^T], [jC, 0]] (t, z) = (v, 0); returns the
/// t-block.  Non-convergence is not fatal: the achieved residual travels
/// with the step results.
inline ProjectionResult project_with_report(const Vec& v, const IterateState& state, double tol,
                                            int max_iter) {
  const std::size_t d = state.x.size();
  const std::size_t p = state.C.size();
  const LinearOperator K = augmented_projection_operator(state.jC);
  KrylovResult mr = minres_solve(K, concat(v, zeros(p)), tol, max_iter);
  return {head(mr.solution, d), mr.residual_norm, mr.iterations};
}

inline Vec project(const Vec& v, const IterateState& state, double tol, int max_iter) {
  return project_with_report(v, state, tol, max_iter).projected;
}

/// MINRES tolerance for applying W~: min(1e-4, max(1e-15, min(||n||, 1/gamma^2))).
inline double projection_tolerance(double n_norm, double gamma, const StepConfig& cfg) {
  double scale = n_norm;
  if (gamma > 0.0) scale = std::min(scale, 1.0 / (gamma * gamma));
  return std::min(cfg.cg_tol_floor, std::max(cfg.cg_tol_abs_floor, scale));
}

/// Inexact tangential step.  Forms the Lagrangian model gradient
/// g = jF^T F + jC^T y + H n with H = jF^T jF + gamma I, projects it, and
/// runs CG on  min 0.5 <H t, t> + <g_hat, t>  with every residual pushed
/// through the approximate projector, as one MINRES solve per CG iteration.
inline TangentialStepResult tangential_step(const IterateState& state, const Vec& n, const Vec& y,
                                            double gamma, const StepConfig& cfg) {
  if (gamma < 0.0) throw std::invalid_argument("tangential_step: gamma must be nonnegative");
  const std::size_t d = state.x.size();
  TangentialStepResult result;

  const LinearOperator H = regularized_normal_operator(state.jF, gamma);
  Vec g = state.jF.apply_adjoint(state.F);
  axpy(1.0, state.jC.apply_adjoint(y), g);
  axpy(1.0, H.apply(n), g);
  result.g = g;

  const double tol_w = projection_tolerance(norm(n), gamma, cfg);
  ProjectionResult pg = project_with_report(g, state, tol_w, cfg.cg_max_iter);
  result.g_hat = std::move(pg.projected);
  result.residual_ghat = pg.residual_norm;
  result.minres_iterations += pg.iterations;

  ProjectionResult pn = project_with_report(n, state, tol_w, cfg.cg_max_iter);
  result.w_n = std::move(pn.projected);
  result.residual_wn = pn.residual_norm;
  result.minres_iterations += pn.iterations;

  result.t_tilde = zeros(d);
  result.t = zeros(d);
  const double ghat_norm = norm(result.g_hat);
  if (ghat_norm == 0.0) return result;

  // Projected CG from zero.  The initial projected residual is g_hat itself.
  Vec t = zeros(d);
  Vec r = result.g_hat;
  Vec z = result.g_hat;
  Vec p = scaled(z, -1.0);
  double rz = dot(r, z);
  double tol_cg = cfg.cg_tol_floor;
  int it = 0;
  while (it < cfg.cg_max_iter && rz > 0.0) {
    Vec Hp = H.apply(p);
    const double pHp = dot(p, Hp);
    if (!std::isfinite(pHp)) throw NumericalBreakdown("tangential_step: non-finite curvature", t);
    if (pHp <= 0.0 || pHp < 1e-300) break;
    const double alpha = rz / pHp;
    axpy(alpha, p, t);
    axpy(alpha, Hp, r);
    ++it;
    ProjectionResult pr = project_with_report(r, state, tol_cg, cfg.cg_max_iter);
    z = std::move(pr.projected);
    result.minres_iterations += pr.iterations;
    const double zn = norm(z);
    if (it == 1)
      tol_cg = krylov_tolerance(zn, cfg.cg_tol_floor, cfg.cg_tol_abs_floor, cfg.cg_tol_rel);
    if (zn <= tol_cg) break;
    const double rz_new = dot(r, z);
    if (!(rz_new > 0.0)) break;
    scale(p, rz_new / rz);
    axpy(-1.0, z, p);
    rz = rz_new;
  }
  result.cg_iterations = it;
  result.t_tilde = t;
  result.pred_t = -0.5 * dot(H.apply(t), t) - dot(result.g_hat, t);

  const double jf_norm = state.jf_norm_estimate();
  const double required = cfg.kappa2 * ghat_norm * ghat_norm / (jf_norm * jf_norm + gamma);
  if (result.pred_t < required) {
    // Cauchy point along -g_hat.
    const double gHg = dot(H.apply(result.g_hat), result.g_hat);
    if (gHg > 0.0) {
      const double alpha = ghat_norm * ghat_norm / gHg;
      Vec tc = scaled(result.g_hat, -alpha);
      const double pred_cauchy = -0.5 * alpha * alpha * gHg + alpha * ghat_norm * ghat_norm;
      if (pred_cauchy > result.pred_t) {
        result.t_tilde = std::move(tc);
        result.pred_t = pred_cauchy;
        result.cauchy_fallback_used = true;
      }
    }
  }
  result.pred_t = std::max(result.pred_t, 0.0);
  result.t = result.t_tilde;
  return result;
}

/// Recovers the step actually taken, t = W~(t_tilde), with the projection
/// tolerance tied to ||n|| and gamma.  s = n + t is the trial step.
inline ProjectionResult recover_step(const Vec& t_tilde, const Vec& n, const IterateState& state,
                                     double gamma, const StepConfig& cfg) {
  const double tol = projection_tolerance(norm(n), gamma, cfg);
  return project_with_report(t_tilde, state, tol, cfg.cg_max_iter);
}

}  // namespace lmec

#endif  // LMEC_STEPS_HPP_
