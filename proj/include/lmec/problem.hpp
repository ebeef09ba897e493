//
// Project lmec - Copyright 2026 The lmec Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LMEC_PROBLEM_HPP_
#define LMEC_PROBLEM_HPP_

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "lmec/linear_operator.hpp"
#include "lmec/vec.hpp"

namespace lmec {

/// Thrown when a user callback returns NaN/Inf; carries the offending point.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::string what, Vec x)
      : std::runtime_error(std::move(what)), x_(std::move(x)) {}
  const Vec& point() const { return x_; }

 private:
  Vec x_;
};

/// An equality-constrained nonlinear least-squares problem
///
///   min 0.5 ||F(x)||^2   subject to   C(x) = 0,
///
/// with F: R^d -> R^m and C: R^d -> R^p, p < d.  Jacobians are supplied as
/// operator factories bound to a point, never as matrices; that contract is
/// what keeps every downstream algorithm matrix-free.
struct ProblemSpec {
  std::size_t d = 0;  // variables
  std::size_t m = 0;  // residuals
  std::size_t p = 0;  // equality constraints
  std::function<Vec(const Vec&)> eval_F;
  std::function<Vec(const Vec&)> eval_C;
  std::function<LinearOperator(const Vec&)> jF;  // d -> m, with adjoint
  std::function<LinearOperator(const Vec&)> jC;  // d -> p, with adjoint
  Vec x0;
  std::string name;

  void validate() const {
    if (d == 0 || m == 0 || p == 0) throw std::invalid_argument("ProblemSpec: dimensions must be positive");
    if (p >= d) throw std::invalid_argument("ProblemSpec: requires p < d");
    if (x0.size() != d) throw std::invalid_argument("ProblemSpec: x0 has wrong dimension");
    if (!eval_F || !eval_C || !jF || !jC) throw std::invalid_argument("ProblemSpec: missing callbacks");
  }
};

/// Everything the solver needs at one point x, evaluated once and cached.
struct IterateState {
  Vec x;
  Vec F;
  Vec C;
  double f = 0.0;    // 0.5 ||F||^2
  double phi = 0.0;  // 0.5 ||C||^2
  LinearOperator jF;
  LinearOperator jC;

  // Operator-norm estimates are consumed by the Cauchy-fraction safeguards;
  // computed lazily, once per iterate.
  double jc_norm_estimate() const {
    if (!jc_norm_) jc_norm_ = estimate_operator_norm(jC);
    return *jc_norm_;
  }
  double jf_norm_estimate() const {
    if (!jf_norm_) jf_norm_ = estimate_operator_norm(jF);
    return *jf_norm_;
  }

 private:
  mutable std::optional<double> jc_norm_;
  mutable std::optional<double> jf_norm_;
};

inline IterateState evaluate(const ProblemSpec& problem, const Vec& x) {
  if (x.size() != problem.d) throw std::invalid_argument("evaluate: x has wrong dimension");
  if (!all_finite(x)) throw EvaluationError("evaluate: non-finite point", x);
  IterateState s;
  s.x = x;
  s.F = problem.eval_F(x);
  s.C = problem.eval_C(x);
  if (s.F.size() != problem.m || s.C.size() != problem.p)
    throw std::invalid_argument("evaluate: user evaluation returned wrong dimension");
  if (!all_finite(s.F)) throw EvaluationError("evaluate: F(x) is non-finite", x);
  if (!all_finite(s.C)) throw EvaluationError("evaluate: C(x) is non-finite", x);
  s.f = 0.5 * dot(s.F, s.F);
  s.phi = 0.5 * dot(s.C, s.C);
  s.jF = problem.jF(x);
  s.jC = problem.jC(x);
  return s;
}

struct FdCheckReport {
  double max_rel_jF = 0.0;
  double max_rel_jC = 0.0;
};

/// Compares the supplied Jacobian operators against central finite
/// differences of eval_F / eval_C along 10 seeded random directions.
/// The relative error is measured against the finite-difference value, so a
/// Jacobian scaled by 2 reports a discrepancy near 1.
inline FdCheckReport fd_check(const ProblemSpec& problem, const Vec& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_check: h must be positive");
  std::mt19937 rng(12345u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const LinearOperator JF = problem.jF(x);
  const LinearOperator JC = problem.jC(x);
  FdCheckReport rep;
  for (int trial = 0; trial < 10; ++trial) {
    Vec v(problem.d);
    for (double& vi : v) vi = unif(rng);
    const double nv = norm(v);
    if (nv == 0.0) continue;
    scale(v, 1.0 / nv);
    Vec xp = x, xm = x;
    axpy(h, v, xp);
    axpy(-h, v, xm);

    Vec fd_F = scaled(sub(problem.eval_F(xp), problem.eval_F(xm)), 0.5 / h);
    Vec fd_C = scaled(sub(problem.eval_C(xp), problem.eval_C(xm)), 0.5 / h);
    const double denom_F = std::max(norm(fd_F), 1e-12);
    const double denom_C = std::max(norm(fd_C), 1e-12);
    rep.max_rel_jF = std::max(rep.max_rel_jF, norm(sub(JF.apply(v), fd_F)) / denom_F);
    rep.max_rel_jC = std::max(rep.max_rel_jC, norm(sub(JC.apply(v), fd_C)) / denom_C);
  }
  return rep;
}

}  // namespace lmec

#endif  // LMEC_PROBLEM_HPP_
