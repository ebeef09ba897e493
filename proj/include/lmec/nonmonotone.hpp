//
// Project lmec - Copyright 2026 The lmec Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LMEC_NONMONOTONE_HPP_
#define LMEC_NONMONOTONE_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>

namespace lmec {

/// Slowly decreasing relaxation sequence a_k = a0 (k+1)^{-1/2}.  Consecutive
/// ratios lie in (alpha0, 1) for any alpha0 <= sqrt(1/2), so no explicit
/// ratio bound is carried at runtime.
inline double a_k(int k, double a0) {
  if (k < 0) throw std::invalid_argument("a_k: k must be nonnegative");
  if (!(a0 > 0.0)) throw std::invalid_argument("a_k: a0 must be positive");
  return a0 / std::sqrt(static_cast<double>(k + 1));
}

/// Bounded histories of ||C||^2 and Lagrangian values plus the state of the
/// feasibility reference level R.  Weights over the history are uniform
/// 1/len, which satisfies the floor mu and sums to one by construction.
class NonmonotoneMemory {
 public:
  NonmonotoneMemory(int nu, double mu, double a0) : nu_(nu), mu_(mu), a0_(a0) {
    if (nu <= 0) throw std::invalid_argument("NonmonotoneMemory: nu must be positive");
    if (!(mu > 0.0) || !(mu * nu <= 1.0))
      throw std::invalid_argument("NonmonotoneMemory: need 0 < mu <= 1/nu");
    if (!(a0 > 0.0)) throw std::invalid_argument("NonmonotoneMemory: a0 must be positive");
  }

  void push_c(double c_sq) { push(c_history_, c_sq); }
  void push_l(double l_value) { push(l_history_, l_value); }

  double weighted_c_average() const { return average(c_history_); }
  double weighted_l_average() const { return average(l_history_); }

  bool empty() const { return c_history_.empty(); }
  int nu() const { return nu_; }
  double mu() const { return mu_; }
  double a0() const { return a0_; }
  int k_counter() const { return k_counter_; }
  double a_current() const { return a_k(k_counter_, a0_); }
  double r_last() const { return r_last_; }
  double newest_c_sq() const { return c_history_.front(); }

  friend std::pair<double, int> update_R(NonmonotoneMemory& mem, double c_norm, double g_hat_norm,
                                         double alpha, double beta);

 private:
  void push(std::deque<double>& h, double v) {
    h.push_front(v);
    if (static_cast<int>(h.size()) > nu_) h.pop_back();
  }
  double average(const std::deque<double>& h) const {
    if (h.empty()) throw std::logic_error("NonmonotoneMemory: empty history");
    double s = 0.0;
    for (double v : h) s += v;
    return s / static_cast<double>(h.size());
  }

  int nu_;
  double mu_;
  double a0_;
  int k_counter_ = 0;
  double r_last_ = 0.0;
  std::deque<double> c_history_;  // newest first
  std::deque<double> l_history_;
};

/// The R_j updating procedure.  When the constraint violation is much smaller
/// than both the relaxation level and the reduced gradient, the reference is
/// lifted above ||C||^2 (and the relaxation counter advances if the lift
/// clears the history average); otherwise R = ||C||^2.
inline std::pair<double, int> update_R(NonmonotoneMemory& mem, double c_norm, double g_hat_norm,
                                       double alpha, double beta) {
  if (c_norm < 0.0 || g_hat_norm < 0.0)
    throw std::invalid_argument("update_R: norms must be nonnegative");
  const double ak = mem.a_current();
  double R;
  int k_next = mem.k_counter_;
  if (c_norm < std::min(alpha * ak, beta * g_hat_norm)) {
    R = std::min(ak * ak, g_hat_norm * g_hat_norm);
    if (!mem.c_history_.empty() && R >= mem.weighted_c_average()) k_next = mem.k_counter_ + 1;
  } else {
    R = c_norm * c_norm;
  }
  mem.r_last_ = R;
  mem.k_counter_ = k_next;
  return {R, k_next};
}

/// Relaxed actual reduction of the constraint violation:
/// 0.5 max{R, avg ||C_{j-k}||^2} - 0.5 ||C(x+s)||^2.
inline double rared_c(const NonmonotoneMemory& mem, double R, double c_trial_sq) {
  if (mem.empty()) throw std::invalid_argument("rared_c: empty history");
  if (R < mem.newest_c_sq() * (1.0 - 1e-12))
    throw std::invalid_argument("rared_c: R must dominate the newest history entry");
  return 0.5 * std::max(R, mem.weighted_c_average()) - 0.5 * c_trial_sq;
}

/// Relaxed actual reduction of the Lagrangian:
/// max{L(x,y), avg L(x_{j-k}, y_{j-k})} - L(x+s, y).
inline double rared_l(const NonmonotoneMemory& mem, double l_now, double l_trial) {
  if (mem.empty()) throw std::invalid_argument("rared_l: empty history");
  return std::max(l_now, mem.weighted_l_average()) - l_trial;
}

enum class Decision { kAcceptFull, kAcceptFeasibility, kReject };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::kAcceptFull: return "ACCEPT_FULL";
    case Decision::kAcceptFeasibility: return "ACCEPT_FEAS";
    case Decision::kReject: return "REJECT";
  }
  return "UNKNOWN";
}

struct AcceptanceInputs {
  double pred_c = 0.0;
  double pred_t = 0.0;
  double pred_l = 0.0;
  double ared_c = 0.0;
  double ared_l = 0.0;
  double rared_c = 0.0;
  double rared_l = 0.0;
  double rho1 = 1e-2;
  double rho2 = 1e-2;
  double xi = 0.75;
};

/// Step acceptance: either the step improves optimality and feasibility in
/// the nonmonotone sense (full accept), or it falls back to a feasibility
/// accept; otherwise reject.
inline Decision decide(const AcceptanceInputs& in) {
  if (in.pred_c < 0.0) throw std::invalid_argument("decide: pred_c must be nonnegative");
  const double pc_gate = std::max(in.pred_c, std::pow(in.pred_c, in.xi));
  const bool optimality_branch = in.pred_t >= pc_gate && in.pred_l >= in.rho2 * in.pred_t;
  if (optimality_branch) {
    if (in.rared_c >= in.rho1 * in.pred_c && in.rared_l >= in.rho1 * in.pred_l)
      return Decision::kAcceptFull;
    return Decision::kReject;
  }
  if (in.rared_c >= in.rho1 * in.pred_c) return Decision::kAcceptFeasibility;
  return Decision::kReject;
}

}  // namespace lmec

#endif  // LMEC_NONMONOTONE_HPP_
