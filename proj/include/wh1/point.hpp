#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wh1 {

/// Error raised by every operation in the library. The message is the
/// contract (tests and the CLI match on it).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point in R^d, d <= 3. Two-dimensional points keep z = 0 so that all
/// geometric kernels can run in 3D without branching on the dimension.
struct Point {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Point() = default;
  Point(double x, double y, double z = 0.0) : c{x, y, z} {}

  double operator[](std::size_t i) const { return c[i]; }
  double& operator[](std::size_t i) { return c[i]; }

  Point& operator+=(const Point& o) {
    for (int k = 0; k < 3; ++k) c[k] += o.c[k];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int k = 0; k < 3; ++k) c[k] -= o.c[k];
    return *this;
  }
  Point& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator/(Point a, double s) { return a *= (1.0 / s); }
  friend bool operator==(const Point& a, const Point& b) { return a.c == b.c; }
};

inline double dot(const Point& a, const Point& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline double squared_norm(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(squared_norm(a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

inline bool is_finite(const Point& a) {
  return std::isfinite(a.c[0]) && std::isfinite(a.c[1]) && std::isfinite(a.c[2]);
}

/// |a - b|^p with the common exponents evaluated without pow().
inline double cost_pow(const Point& a, const Point& b, double p) {
  const double d2 = squared_norm(a - b);
  if (p == 2.0) return d2;
  const double d = std::sqrt(d2);
  if (p == 1.0) return d;
  if (p == 3.0) return d2 * d;
  return std::pow(d, p);
}

inline double pow_p(double d, double p) {
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  if (p == 3.0) return d * d * d;
  return std::pow(d, p);
}

/// A weighted Dirac mass.
struct Atom {
  Point x;
  double w = 0.0;
};

using Atoms = std::vector<Atom>;

inline double total_mass(const Atoms& atoms) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.w;
  return s;
}

}  // namespace wh1
