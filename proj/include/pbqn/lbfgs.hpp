#pragma once

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

#include "pbqn/vector_ops.hpp"

namespace pbqn {

/// One curvature observation: displacement s, gradient difference y, and
/// rho = 1/(y.s). Pairs are only stored once y.s > 0 has been verified.
struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;
};

/// Bounded FIFO of curvature pairs defining the implicit inverse Hessian
///   H = (V^T ... ) gamma I ( ... V ) + rank-one terms,
/// applied through the two-loop recursion with H0 = gamma I. gamma tracks
/// y.s / y.y of the most recently admitted pair and is 1 while empty.
class CurvatureMemory {
 public:
  explicit CurvatureMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("memory capacity must be >= 1");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  double gamma() const { return gamma_; }
  const CurvaturePair& pair(std::size_t i) const { return pairs_[i]; }  // oldest first

  /// Override the H0 scaling; normally gamma is derived from admissions.
  void set_gamma(double g) {
    if (g <= 0.0) throw std::invalid_argument("gamma must be positive");
    gamma_ = g;
  }

  /// Cautious admission: store (s, y) only when y.s > eps * |s|^2, evicting
  /// the oldest pair past capacity and refreshing gamma. A zero step or
  /// insufficient curvature leaves the memory untouched and returns false.
  bool try_admit(const Vector& s, const Vector& y, double eps) {
    if (all_zero(s)) return false;
    const double sy = dot(s, y);
    if (!(sy > eps * norm_sq(s))) return false;
    if (pairs_.size() == capacity_) pairs_.pop_front();
    pairs_.push_back({s, y, 1.0 / sy});
    gamma_ = sy / dot(y, y);
    return true;
  }

  /// r = H g via the two-loop recursion; an empty memory yields gamma * g.
  void apply(const Vector& g, Vector& r) const {
    const std::size_t m = pairs_.size();
    std::vector<double> alpha(m);
    r = g;
    for (std::size_t idx = m; idx-- > 0;) {
      const CurvaturePair& p = pairs_[idx];
      alpha[idx] = p.rho * dot(p.s, r);
      axpy(-alpha[idx], p.y, r);
    }
    scale(r, gamma_);
    for (std::size_t idx = 0; idx < m; ++idx) {
      const CurvaturePair& p = pairs_[idx];
      const double beta = p.rho * dot(p.y, r);
      axpy(alpha[idx] - beta, p.s, r);
    }
  }

  Vector apply(const Vector& g) const {
    Vector r;
    apply(g, r);
    return r;
  }

  /// H (H g), computed as two successive applications.
  Vector apply_squared(const Vector& g) const { return apply(apply(g)); }

 private:
  std::size_t capacity_;
  std::deque<CurvaturePair> pairs_;
  double gamma_ = 1.0;
};

}  // namespace pbqn
