//
// Project lmec - Copyright 2026 The lmec Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LMEC_KRYLOV_HPP_
#define LMEC_KRYLOV_HPP_

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "lmec/linear_operator.hpp"
#include "lmec/vec.hpp"

namespace lmec {

/// Thrown when a solver encounters NaN/Inf; carries the last iterate so the
/// caller can inspect or salvage it.
class NumericalBreakdown : public std::runtime_error {
 public:
  NumericalBreakdown(std::string what, Vec last_iterate)
      : std::runtime_error(std::move(what)), last_iterate_(std::move(last_iterate)) {}
  const Vec& last_iterate() const { return last_iterate_; }

 private:
  Vec last_iterate_;
};

struct KrylovResult {
  Vec solution;
  double residual_norm = 0.0;  // ||rhs - op*solution||, recomputed exactly
  int iterations = 0;
  bool converged = false;
};

/// Observers receive (iteration index, current iterate); used by tests to
/// instrument model decrease and residual monotonicity.
using IterateObserver = std::function<void(int, const Vec&)>;

/// Conjugate gradients for a symmetric positive (semi-)definite operator.
/// Zero starting point unless x0 is given.  The tolerance is absolute on the
/// residual norm.  Hitting max_iter is not an error: the best iterate is
/// returned with converged=false.  On a semidefinite system the iteration
/// stops when the curvature along the search direction degenerates.
inline KrylovResult cg_solve(const LinearOperator& op, const Vec& rhs, double tol, int max_iter,
                             std::optional<Vec> x0 = std::nullopt,
                             const IterateObserver& observe = nullptr) {
  if (op.in_dim != op.out_dim) throw std::invalid_argument("cg_solve: operator must be square");
  if (rhs.size() != op.in_dim) throw std::invalid_argument("cg_solve: rhs dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("cg_solve: tol must be positive");
  if (!all_finite(rhs)) throw NumericalBreakdown("cg_solve: non-finite rhs", zeros(op.in_dim));

  Vec x = x0 ? *x0 : zeros(op.in_dim);
  Vec r = rhs;
  if (x0) r = sub(rhs, op.apply(x));
  Vec p = r;
  double rr = dot(r, r);
  int it = 0;

  auto finish = [&](bool hit_tol) {
    KrylovResult res;
    res.residual_norm = norm(sub(rhs, op.apply(x)));
    res.solution = std::move(x);
    res.iterations = it;
    res.converged = hit_tol && res.residual_norm <= tol;
    return res;
  };

  if (std::sqrt(rr) <= tol) return finish(true);

  while (it < max_iter) {
    Vec q = op.apply(p);
    const double pq = dot(p, q);
    if (!std::isfinite(pq)) throw NumericalBreakdown("cg_solve: non-finite curvature", x);
    // Degenerate curvature: the operator is singular along p (gamma = 0
    // Gauss-Newton systems); stop with the best iterate so far.
    if (pq <= 0.0 || pq < 1e-300) return finish(false);
    const double alpha = rr / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    ++it;
    if (!all_finite(x) || !all_finite(r)) throw NumericalBreakdown("cg_solve: non-finite iterate", x);
    if (observe) observe(it, x);
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= tol) return finish(true);
    const double beta = rr_new / rr;
    rr = rr_new;
    scale(p, beta);
    axpy(1.0, r, p);
  }
  return finish(false);
}

/// MINRES (Paige-Saunders) for a symmetric, possibly indefinite operator,
/// from a zero starting point.  Absolute residual-norm tolerance; the
/// reported residual norm is recomputed as ||rhs - op*solution||.
inline KrylovResult minres_solve(const LinearOperator& op, const Vec& rhs, double tol, int max_iter,
                                 const IterateObserver& observe = nullptr) {
  if (op.in_dim != op.out_dim) throw std::invalid_argument("minres_solve: operator must be square");
  if (rhs.size() != op.in_dim) throw std::invalid_argument("minres_solve: rhs dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("minres_solve: tol must be positive");
  if (!all_finite(rhs)) throw NumericalBreakdown("minres_solve: non-finite rhs", zeros(op.in_dim));

  const std::size_t n = op.in_dim;
  Vec x = zeros(n);
  int it = 0;

  auto finish = [&](bool hit_tol) {
    KrylovResult res;
    res.residual_norm = norm(sub(rhs, op.apply(x)));
    res.solution = std::move(x);
    res.iterations = it;
    res.converged = hit_tol && res.residual_norm <= tol;
    return res;
  };

  const double beta1 = norm(rhs);
  if (beta1 <= tol) return finish(true);

  // Lanczos state: r2 = beta_k v_k (unnormalized), r1 = beta_{k-1} v_{k-1}.
  Vec r1 = rhs;
  Vec r2 = rhs;
  Vec y = rhs;
  double oldb = 0.0, beta = beta1;
  double dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vec w = zeros(n), w2 = zeros(n);

  while (it < max_iter) {
    ++it;
    Vec v = scaled(y, 1.0 / beta);
    y = op.apply(v);
    if (it >= 2) axpy(-beta / oldb, r1, y);
    const double alfa = dot(v, y);
    axpy(-alfa / beta, r2, y);
    r1 = std::move(r2);
    r2 = y;
    oldb = beta;
    beta = norm(r2);
    if (!std::isfinite(alfa) || !std::isfinite(beta))
      throw NumericalBreakdown("minres_solve: non-finite Lanczos step", x);

    // Apply the previous rotation, then compute the next one.
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::sqrt(gbar * gbar + beta * beta);
    gamma = std::max(gamma, 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    Vec w1 = std::move(w2);
    w2 = w;
    w = v;
    axpy(-oldeps, w1, w);
    axpy(-delta, w2, w);
    scale(w, 1.0 / gamma);
    axpy(phi, w, x);
    if (!all_finite(x)) throw NumericalBreakdown("minres_solve: non-finite iterate", x);
    if (observe) observe(it, x);

    if (phibar <= tol) return finish(true);
    // Happy breakdown: the Krylov space is exhausted.
    if (beta <= 1e-300 * beta1) return finish(true);
  }
  return finish(false);
}

/// Residual norm after a single CG iteration from zero; the §-style
/// tolerance recipes below scale with this quantity.
inline double cg_residual_after_one_step(const LinearOperator& op, const Vec& rhs) {
  const double rr = dot(rhs, rhs);
  if (rr == 0.0) return 0.0;
  Vec q = op.apply(rhs);
  const double pq = dot(rhs, q);
  if (!(pq > 0.0)) return std::sqrt(rr);
  Vec r = rhs;
  axpy(-rr / pq, q, r);
  return norm(r);
}

/// min(floor, max(abs_floor, rel * seed)): the inner-solver tolerance recipe
/// used throughout the solver, seeded by the one-step CG residual norm.
inline double krylov_tolerance(double seed, double floor_tol = 1e-4, double abs_floor = 1e-15,
                               double rel = 1e-8) {
  return std::min(floor_tol, std::max(abs_floor, rel * seed));
}

}  // namespace lmec

#endif  // LMEC_KRYLOV_HPP_
