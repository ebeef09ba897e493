//
// Project lmec - Copyright 2026 The lmec Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LMEC_VEC_HPP_
#define LMEC_VEC_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

namespace lmec {

/// Dense column vector of doubles; the only vector type the library uses.
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

/// y += alpha * x
inline void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(Vec& x, double alpha) {
  for (double& xi : x) xi *= alpha;
}

inline Vec scaled(const Vec& x, double alpha) {
  Vec r = x;
  scale(r, alpha);
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec r = a;
  axpy(1.0, b, r);
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r = a;
  axpy(-1.0, b, r);
  return r;
}

inline bool all_finite(const Vec& a) {
  for (double ai : a)
    if (!std::isfinite(ai)) return false;
  return true;
}

/// Concatenate two vectors (used for saddle-point systems).
inline Vec concat(const Vec& a, const Vec& b) {
  Vec r;
  r.reserve(a.size() + b.size());
  r.insert(r.end(), a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Vec head(const Vec& a, std::size_t n) { return Vec(a.begin(), a.begin() + n); }

inline Vec tail(const Vec& a, std::size_t n) { return Vec(a.end() - n, a.end()); }

}  // namespace lmec

#endif  // LMEC_VEC_HPP_
