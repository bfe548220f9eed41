#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace gfopt {

using Vector = std::vector<double>;

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Vector add(std::span<const double> a, std::span<const double> b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector sub(std::span<const double> a, std::span<const double> b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector scaled(std::span<const double> a, double c) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

/// a += c * b
inline void axpy(Vector& a, double c, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
}

inline void scale_in_place(Vector& a, double c) {
  for (double& x : a) x *= c;
}

inline bool all_finite(std::span<const double> a) {
  for (double x : a) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace vec

namespace num {

// Count-valued formulas evaluated in floating point can land a hair off an
// exact integer; snap within a relative tolerance before rounding.
inline long long ceil_snapped(double x, double rel = 1e-9) {
  const double r = std::round(x);
  if (std::abs(x - r) <= rel * std::max(1.0, std::abs(x))) {
    return static_cast<long long>(r);
  }
  return static_cast<long long>(std::ceil(x));
}

inline long long floor_snapped(double x, double rel = 1e-9) {
  const double r = std::round(x);
  if (std::abs(x - r) <= rel * std::max(1.0, std::abs(x))) {
    return static_cast<long long>(r);
  }
  return static_cast<long long>(std::floor(x));
}

}  // namespace num

}  // namespace gfopt
