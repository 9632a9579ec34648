#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pbqn {

/// Dense parameter / gradient vector.
using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vector& a) { return dot(a, a); }

inline double norm(const Vector& a) { return std::sqrt(norm_sq(a)); }

inline double inf_norm(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// y += c * x
inline void axpy(double c, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(Vector& x, double c) {
  for (double& v : x) v *= c;
}

inline void set_zero(Vector& x) { x.assign(x.size(), 0.0); }

inline Vector add_scaled(const Vector& x, double c, const Vector& p) {
  Vector out(x);
  axpy(c, p, out);
  return out;
}

inline Vector subtract(const Vector& a, const Vector& b) {
  Vector out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

inline bool all_finite(const Vector& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline bool all_zero(const Vector& x) {
  for (double v : x) {
    if (v != 0.0) return false;
  }
  return true;
}

/// Largest componentwise relative deviation, with an absolute floor for
/// entries near zero. Test and verification helper.
inline double relative_error(const Vector& a, const Vector& b,
                             double floor = 1e-30) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("relative_error: size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom =
        std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace pbqn
