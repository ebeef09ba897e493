//
// Project lmec - Copyright 2026 The lmec Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LMEC_LINEAR_OPERATOR_HPP_
#define LMEC_LINEAR_OPERATOR_HPP_

#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>

#include "lmec/vec.hpp"

namespace lmec {

/// A linear map defined purely by its action on vectors.  Everything in this
/// library (Jacobians, normal operators, saddle-point systems) is one of
/// these; no matrix is ever formed.
struct LinearOperator {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::function<Vec(const Vec&)> action;
  /// Transpose action; empty when the operator is only applied forward.
  std::function<Vec(const Vec&)> adjoint_action;

  Vec apply(const Vec& v) const {
    if (v.size() != in_dim) throw std::invalid_argument("LinearOperator: input dimension mismatch");
    return action(v);
  }

  Vec apply_adjoint(const Vec& u) const {
    if (!adjoint_action) throw std::invalid_argument("LinearOperator: adjoint action not provided");
    if (u.size() != out_dim) throw std::invalid_argument("LinearOperator: adjoint input dimension mismatch");
    return adjoint_action(u);
  }

  bool has_adjoint() const { return static_cast<bool>(adjoint_action); }
};

inline LinearOperator identity_operator(std::size_t n) {
  return {n, n, [](const Vec& v) { return v; }, [](const Vec& v) { return v; }};
}

/// v -> J^T(J v) + gamma v.  Symmetric, and positive definite for gamma > 0.
/// This is both the normal-step system matrix (built from the constraint
/// Jacobian) and the Gauss-Newton model Hessian (built from the residual
/// Jacobian).
inline LinearOperator regularized_normal_operator(const LinearOperator& J, double gamma) {
  if (!J.has_adjoint()) throw std::invalid_argument("regularized_normal_operator: J must have an adjoint");
  if (gamma < 0.0) throw std::invalid_argument("regularized_normal_operator: gamma must be >= 0");
  const std::size_t n = J.in_dim;
  auto act = [J, gamma](const Vec& v) {
    Vec r = J.apply_adjoint(J.apply(v));
    axpy(gamma, v, r);
    return r;
  };
  return {n, n, act, act};
}

/// The symmetric saddle-point operator [[I, J^T], [J, 0]] of dimension
/// in_dim + out_dim, used to apply the nullspace projector matrix-free.
inline LinearOperator augmented_projection_operator(const LinearOperator& J) {
  if (!J.has_adjoint()) throw std::invalid_argument("augmented_projection_operator: J must have an adjoint");
  const std::size_t d = J.in_dim;
  const std::size_t p = J.out_dim;
  auto act = [J, d, p](const Vec& w) {
    Vec t(w.begin(), w.begin() + d);
    Vec z(w.begin() + d, w.end());
    Vec top = add(t, J.apply_adjoint(z));
    Vec bottom = J.apply(t);
    return concat(top, bottom);
  };
  return {d + p, d + p, act, act};
}

/// Largest-singular-value estimate of J via power iteration on J^T J.
/// The probe start is deterministically seeded so repeated calls agree.
inline double estimate_operator_norm(const LinearOperator& J, int iterations = 20) {
  std::mt19937 rng(0x9e3779b9u ^ static_cast<unsigned>(J.in_dim * 2654435761u + J.out_dim));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec v(J.in_dim);
  for (double& vi : v) vi = unif(rng);
  double nv = norm(v);
  if (nv == 0.0) return 0.0;
  scale(v, 1.0 / nv);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vec w = J.apply_adjoint(J.apply(v));
    lambda = dot(v, w);
    double nw = norm(w);
    if (nw == 0.0) return 0.0;
    scale(w, 1.0 / nw);
    v = std::move(w);
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace lmec

#endif  // LMEC_LINEAR_OPERATOR_HPP_
