// SPDX-License-Identifier: Apache-2.0
//
// Basic value types shared by every module: planar vectors, 2x2 matrices,
// computational windows and the error type.

#ifndef SINGLOC_CORE_HPP_
#define SINGLOC_CORE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace singloc {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

/// Chart points and chart vectors share a representation; the name documents intent.
using Point2 = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }
inline Vec2 rotate(Vec2 a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Wraps an angle difference into (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::remainder(a - b, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

/// Symmetric-or-not 2x2 matrix, row major.
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }
  static constexpr Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }
  constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend constexpr Mat2 operator+(Mat2 m, Mat2 n) { return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d}; }
  friend constexpr Mat2 operator-(Mat2 m, Mat2 n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
  friend constexpr Mat2 operator*(double s, Mat2 m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  constexpr double bilinear(Vec2 u, Vec2 v) const { return dot(u, (*this) * v); }
  double max_abs_diff(const Mat2& o) const {
    return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
  }

  /// Eigenvalues of the symmetric part, ascending.
  std::array<double, 2> sym_eigenvalues() const {
    const double off = 0.5 * (b + c);
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), off);
    return {mean - rad, mean + rad};
  }
};

enum class ErrorCode {
  invalid_input,
  invalid_metric,
  domain_error,
  numeric_failure,
  not_differentiable,
  almost_distance_violation,
  not_applicable,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_metric: return "invalid-metric";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::numeric_failure: return "numeric-failure";
    case ErrorCode::not_differentiable: return "not-differentiable";
    case ErrorCode::almost_distance_violation: return "almost-distance-violation";
    case ErrorCode::not_applicable: return "not-applicable";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Axis-aligned computational window. A periodic window is one fundamental
/// domain of a flat torus; coordinates are identified modulo its extents.
struct Window {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  bool periodic = false;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diagonal() const { return std::hypot(width(), height()); }
  Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  bool contains(Point2 p, double margin = 0.0) const {
    if (periodic) return true;
    return p.x >= xmin - margin && p.x <= xmax + margin && p.y >= ymin - margin && p.y <= ymax + margin;
  }
  Point2 wrap(Point2 p) const {
    if (!periodic) return p;
    auto w = [](double v, double lo, double len) {
      double r = std::fmod(v - lo, len);
      if (r < 0) r += len;
      return lo + r;
    };
    return {w(p.x, xmin, width()), w(p.y, ymin, height())};
  }
  /// Shortest chart displacement from a to b, honoring periodicity.
  Vec2 displacement(Point2 a, Point2 b) const {
    Vec2 d = b - a;
    if (periodic) {
      d.x = std::remainder(d.x, width());
      d.y = std::remainder(d.y, height());
    }
    return d;
  }
};

/// Declared range (inf f, sup f) of a field; infinities allowed.
struct Range {
  double inf = -kInf;
  double sup = kInf;
  bool interior(double v, double margin = 1e-9) const { return v > inf + margin && v < sup - margin; }
};

}  // namespace singloc

#endif  // SINGLOC_CORE_HPP_
