// SPDX-License-Identifier: Apache-2.0
// Shipped scenarios: standard geometries and the accumulating-disk constructions,
// each with exact oracle data.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "singloc/field.hpp"
#include "singloc/singular.hpp"

namespace singloc {

/// How an oracle value is known.
enum class OracleBasis {
  construction,  // stated for the construction itself
  elementary,    // immediate from the definitions
  independent,   // computed by a named independent procedure
};

inline const char* to_string(OracleBasis b) {
  switch (b) {
    case OracleBasis::construction: return "construction";
    case OracleBasis::elementary: return "elementary";
    case OracleBasis::independent: return "independent";
  }
  return "unknown";
}

struct OracleTag {
  OracleBasis basis = OracleBasis::elementary;
  std::string procedure;  // for independent values
};

struct OraclePoint {
  Point2 point;
  SingularLabel label;
  OracleTag tag;
};

/// Maximal f-geodesic expected along origin + t dir, t in [0, length) (length inf: a ray).
struct OracleRay {
  Point2 origin;
  Vec2 dir;
  double length = kInf;
  OracleTag tag;
};

struct OracleValue {
  Point2 point;
  double value;
  OracleTag tag;
};

struct OracleDistance {
  Point2 from, to;
  double value;
  OracleTag tag;
};

struct OracleLevel {
  double t;
  int components;
  bool regular;
  OracleTag tag;
};

/// f = d_N + c on `region` with N the minimum level of f there.
struct OracleReconstruction {
  double c = 0.0;
  std::optional<Window> region;
  OracleTag tag;
};

struct OracleData {
  std::vector<OraclePoint> singular_points;
  std::vector<OracleRay> rays;
  std::vector<double> critical_values;  // sorted, with multiplicity
  OracleTag critical_tag;
  bool critical_values_known = false;
  std::vector<OracleLevel> levels;
  std::vector<OracleValue> values;
  std::vector<OracleDistance> distances;
  std::vector<Point2> upper_locus;  // dense samples of C_+ when known in closed form
  std::vector<Point2> lower_locus;
  bool upper_locus_complete = false;  // upper_locus samples all of C_+ inside the window
  std::optional<OracleReconstruction> reconstruction;
};

struct ScenarioConfig {
  int K = 8;                  // number of disks kept in the accumulating constructions
  std::vector<double> theta;  // empty: theta_i = pi 2^-i
  Point2 torus_point{0, 0};
  Vec2 wind{0.5, 0};
  double a = 0.2, b = 0.6;            // sector of the f_ab construction
  std::vector<double> stack_eps;      // empty: {1.2, 0.6, 0.3, 0.15}
  int grid_n = 256;
  double delta = 0.0;                 // probe length; <= 0: field default
  int angular_res = 720;
  double cover = 1e-2;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string window_note;  // why the window does not affect reported quantities
  ScalarField field;
  OracleData oracle;
  ScenarioConfig config;

  const Metric& metric() const { return field.metric(); }
  const Window& window() const { return field.window(); }
};

// --------------------------------------------------------------------------
// Geometry of the accumulating-disk constructions

/// theta_1 > theta_2 > ... > theta_{K+1} > 0 with theta_1 < pi; the default halves from pi/2.
inline std::vector<double> default_theta(int K) {
  std::vector<double> t;
  for (int i = 1; i <= K + 1; ++i) t.push_back(std::numbers::pi * std::ldexp(1.0, -i));
  return t;
}

struct DiskConstruction {
  std::vector<double> theta;  // K + 1 angles
  std::vector<double> omega;  // K bisector angles
  std::vector<Point2> p;      // centres above the axis
  std::vector<double> r;      // their radii
  std::vector<Point2> u;      // mirrored centres below the axis
  int K() const { return static_cast<int>(omega.size()); }
  Vec2 e(int i) const { return {std::cos(theta[i]), -std::sin(theta[i])}; }  // direction of q_i (0-based)
};

inline DiskConstruction disk_construction(int K, std::vector<double> theta = {}) {
  if (K < 2) throw Error(ErrorCode::invalid_input, "K must be >= 2");
  if (theta.empty()) theta = default_theta(K);
  if (static_cast<int>(theta.size()) < K + 1) throw Error(ErrorCode::invalid_input, "theta rule needs K + 1 angles");
  theta.resize(K + 1);
  if (!(theta[0] < std::numbers::pi)) throw Error(ErrorCode::invalid_input, "theta_1 must be < pi");
  for (int i = 0; i <= K; ++i) {
    if (!(theta[i] > 0)) throw Error(ErrorCode::invalid_input, "theta must be positive");
    if (i > 0 && !(theta[i] < theta[i - 1])) throw Error(ErrorCode::invalid_input, "theta must strictly decrease");
  }
  DiskConstruction c;
  c.theta = theta;
  for (int i = 0; i < K; ++i) {
    const double w = 0.5 * (theta[i] + theta[i + 1]);
    c.omega.push_back(w);
    c.p.push_back({2 * std::cos(w), 2 * std::sin(w)});
    c.r.push_back(norm(c.p.back() - Point2{std::cos(theta[i]), std::sin(theta[i])}));
    c.u.push_back({2 * std::cos(w), -2 * std::sin(w)});
  }
  return c;
}

/// N = D_1 minus the open disks B_{r_i}(p_i).
inline ClosedSet construction_set_N(const DiskConstruction& c) {
  std::vector<ClosedSet> holes;
  for (int i = 0; i < c.K(); ++i) holes.push_back(ClosedSet::disk(c.p[i], c.r[i]));
  return ClosedSet::subtract(ClosedSet::disk({0, 0}, 1), ClosedSet::unite(holes));
}

/// C_n = complement of B_n(o) and the disks about u_i through q_i = n e_i.
inline ClosedSet construction_set_C(const DiskConstruction& c, double n) {
  std::vector<ClosedSet> parts{ClosedSet::disk({0, 0}, n)};
  for (int i = 0; i < c.K(); ++i) parts.push_back(ClosedSet::disk(c.u[i], norm(c.u[i] - n * c.e(i))));
  return ClosedSet::complement(ClosedSet::unite(parts));
}

/// lim_n (n - d(x, C_n)). The boundary of C_n in direction phi sits at radius
/// n + h(phi) + o(1) with h = max(0, u_i.(e_phi - e_i)), positive exactly on the
/// sector (-theta_i, -theta_{i+1}); hence eta = sup_phi (x.e_phi - h(phi)).
inline double eta_limit(const DiskConstruction& c, Point2 x) {
  const double rx = norm(x);
  if (rx == 0) return 0.0;
  const double a = std::atan2(x.y, x.x);
  for (int i = 0; i < c.K(); ++i) {
    if (!(a > -c.theta[i] && a < -c.theta[i + 1])) continue;
    const Vec2 d = x - c.u[i];
    const double b = std::atan2(d.y, d.x);
    const double base = 2 * std::cos(0.5 * (c.theta[i] - c.theta[i + 1]));
    if (norm(d) == 0 || (b >= -c.theta[i] && b <= -c.theta[i + 1])) return norm(d) + base;
    return std::max(dot(x, c.e(i)), dot(x, c.e(i + 1)));
  }
  return rx;
}

// --------------------------------------------------------------------------
// Builders

namespace detail {

inline Window box(double s) { return {-s, s, -s, s, false}; }

inline OracleTag construction() { return {OracleBasis::construction, ""}; }
inline OracleTag elementary() { return {OracleBasis::elementary, ""}; }
inline OracleTag independent(std::string p) { return {OracleBasis::independent, std::move(p)}; }

inline std::vector<Point2> segment_samples(Point2 a, Point2 b, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / step)));
  std::vector<Point2> out;
  for (int k = 0; k <= n; ++k) out.push_back(a + (static_cast<double>(k) / n) * (b - a));
  return out;
}

}  // namespace detail

inline Scenario build_euclidean_point(const ScenarioConfig& cfg = {}) {
  Scenario s;
  s.name = "euclidean_point";
  s.description = "Euclidean distance from the origin";
  s.window_note = "[-4,4]^2; the only singular point is the source";
  s.config = cfg;
  s.field = dist_from_set(Metric::euclidean(), ClosedSet::point({0, 0}), detail::box(4));
  s.oracle.upper_locus_complete = true;
  s.oracle.reconstruction = OracleReconstruction{0.0, std::nullopt, detail::elementary()};
  auto& o = s.oracle;
  o.singular_points.push_back({{0, 0}, SingularLabel::lower_singular, detail::elementary()});
  o.lower_locus = {{0, 0}};
  o.critical_values_known = true;
  o.critical_tag = detail::elementary();
  for (Point2 q : {Point2{3, 4}, Point2{-1, 0}, Point2{0.5, -0.5}}) o.values.push_back({q, norm(q), detail::elementary()});
  for (double th : {0.0, 1.0, 2.5, 4.0}) o.rays.push_back({{0, 0}, {std::cos(th), std::sin(th)}, kInf, detail::elementary()});
  return s;
}

inline Scenario build_busemann_x(const ScenarioConfig& cfg = {}) {
  Scenario s;
  s.name = "busemann_x";
  s.description = "Busemann function of the ray along +x";
  s.window_note = "[-4,4]^2; no singular points anywhere";
  s.config = cfg;
  s.field = busemann(Metric::euclidean(), {1, 0}, {0, 0}, detail::box(4));
  s.oracle.upper_locus_complete = true;
  auto& o = s.oracle;
  o.critical_values_known = true;
  o.critical_tag = detail::elementary();
  for (Point2 q : {Point2{1, 2}, Point2{-3, 0.5}, Point2{0.25, -1}})
    o.values.push_back({q, q.x, detail::independent("limit t - |x - t e1| = x1")});
  for (double y : {-2.0, 0.0, 1.5}) o.rays.push_back({{-4, y}, {1, 0}, kInf, detail::elementary()});
  return s;
}

inline Scenario build_randers_wind(const ScenarioConfig& cfg = {}) {
  if (!(norm(cfg.wind) < 1)) throw Error(ErrorCode::invalid_input, "wind must satisfy |W| < 1");
  Scenario s;
  s.name = "randers_wind";
  s.description = "distance from the origin under a constant-wind Zermelo metric";
  s.window_note = "[-4,4]^2; geodesics are chart lines, the window only truncates rays";
  s.config = cfg;
  const Metric m = Metric::randers_zermelo(cfg.wind);
  s.field = dist_from_set(m, ClosedSet::point({0, 0}), detail::box(4));
  s.oracle.upper_locus_complete = true;
  auto& o = s.oracle;
  // |q - p - T W| = T solved for T.
  auto travel = [W = cfg.wind](Point2 p, Point2 q) {
    const Vec2 d = q - p;
    const double lam = 1 - dot(W, W);
    return (std::sqrt(dot(d, W) * dot(d, W) + lam * dot(d, d)) - dot(d, W)) / lam;
  };
  const OracleTag quad = detail::independent("quadratic |q - p - T W| = T");
  o.singular_points.push_back({{0, 0}, SingularLabel::lower_singular, detail::elementary()});
  o.lower_locus = {{0, 0}};
  o.critical_values_known = true;
  o.critical_tag = detail::elementary();
  for (Point2 q : {Point2{1, 0}, Point2{-1, 0}, Point2{0, 2}, Point2{2, -1}}) o.values.push_back({q, travel({0, 0}, q), quad});
  o.distances.push_back({{0, 0}, {1, 0}, travel({0, 0}, {1, 0}), quad});
  o.distances.push_back({{1, 0}, {0, 0}, travel({1, 0}, {0, 0}), quad});
  for (double th : {0.0, 1.5, 3.0}) o.rays.push_back({{0, 0}, {std::cos(th), std::sin(th)}, kInf, detail::elementary()});
  return s;
}

inline Scenario build_flat_torus(const ScenarioConfig& cfg = {}) {
  Scenario s;
  s.name = "flat_torus";
  s.description = "distance from a point on the unit flat torus";
  s.window_note = "one fundamental domain, periodic; nothing is truncated";
  s.config = cfg;
  const Window w{0, 1, 0, 1, true};
  const Point2 p = w.wrap(cfg.torus_point);
  s.field = dist_from_set(Metric::flat_torus(1, 1), ClosedSet::point(p), w);
  auto& o = s.oracle;
  const OracleTag lat = detail::independent("lattice translates of the source");
  const Point2 cx = w.wrap(p + Vec2{0.5, 0}), cy = w.wrap(p + Vec2{0, 0.5}), cv = w.wrap(p + Vec2{0.5, 0.5});
  o.singular_points.push_back({p, SingularLabel::lower_singular, detail::elementary()});
  o.singular_points.push_back({cx, SingularLabel::upper_singular, lat});
  o.singular_points.push_back({cy, SingularLabel::upper_singular, lat});
  o.singular_points.push_back({cv, SingularLabel::upper_singular, lat});
  o.lower_locus = {p};
  o.upper_locus_complete = true;
  for (int k = 0; k < 1024; ++k) {
    const double t = (k + 0.5) / 1024;
    o.upper_locus.push_back(w.wrap({cv.x, p.y + t}));
    o.upper_locus.push_back(w.wrap({p.x + t, cv.y}));
  }
  o.critical_values = {0.5, 0.5, std::sqrt(0.5)};
  o.critical_values_known = true;
  o.critical_tag = lat;
  o.values.push_back({cv, std::sqrt(0.5), lat});
  o.values.push_back({cx, 0.5, lat});
  o.values.push_back({w.wrap(p + Vec2{0.2, 0.1}), std::hypot(0.2, 0.1), lat});
  o.distances.push_back({p, cv, std::sqrt(0.5), lat});
  o.rays.push_back({p, {1, 0}, 0.5, lat});
  o.rays.push_back({p, {0, 1}, 0.5, lat});
  o.levels.push_back({0.3, 1, true, lat});
  return s;
}

inline Scenario build_two_point_dN(const ScenarioConfig& cfg = {}) {
  Scenario s;
  s.name = "two_point_dN";
  s.description = "distance from the two-point set {(-1,0), (1,0)}";
  s.window_note = "[-3,3]^2; the bisector runs to the border and is clipped there";
  s.config = cfg;
  s.field = dist_from_set(Metric::euclidean(), ClosedSet::unite(ClosedSet::point({-1, 0}), ClosedSet::point({1, 0})),
                          detail::box(3));
  auto& o = s.oracle;
  const OracleTag bis = detail::independent("perpendicular bisector");
  o.singular_points.push_back({{0, 1}, SingularLabel::upper_singular, bis});
  o.singular_points.push_back({{0, -2}, SingularLabel::upper_singular, bis});
  o.singular_points.push_back({{-1, 0}, SingularLabel::lower_singular, detail::elementary()});
  o.singular_points.push_back({{1, 0}, SingularLabel::lower_singular, detail::elementary()});
  o.upper_locus = detail::segment_samples({0, -3}, {0, 3}, 0.005);
  o.lower_locus = {{-1, 0}, {1, 0}};
  o.upper_locus_complete = true;
  o.reconstruction = OracleReconstruction{0.0, std::nullopt, detail::elementary()};
  o.critical_values = {1.0};
  o.critical_values_known = true;
  o.critical_tag = detail::independent("midpoint of the two sources");
  o.levels.push_back({0.5, 2, true, detail::independent("two disjoint circles")});
  o.levels.push_back({1.5, 1, true, detail::independent("union of two overlapping disks")});
  o.levels.push_back({1.0, 1, false, detail::independent("tangent circles at the midpoint")});
  for (double y : {0.0, 1.0, 2.0}) o.values.push_back({{0, y}, std::sqrt(1 + y * y), bis});
  o.rays.push_back({{1, 0}, {1, 0}, kInf, detail::elementary()});
  o.rays.push_back({{1, 0}, {0, 1}, 1.0, bis});
  return s;
}

inline Scenario build_disk_plus_one(const ScenarioConfig& cfg = {}) {
  Scenario s;
  s.name = "disk_plus_one";
  s.description = "distance from the closed unit disk, plus one";
  s.window_note = "[-4,4]^2; level sets are concentric circles";
  s.config = cfg;
  s.field = shifted(dist_from_set(Metric::euclidean(), ClosedSet::disk({0, 0}, 1), detail::box(4)), 1.0);
  s.oracle.upper_locus_complete = true;
  s.oracle.reconstruction = OracleReconstruction{1.0, std::nullopt, detail::elementary()};
  auto& o = s.oracle;
  o.critical_values_known = true;
  o.critical_tag = detail::elementary();
  for (Point2 q : {Point2{2, 0}, Point2{0, -3}, Point2{0.2, 0.3}})
    o.values.push_back({q, std::max(norm(q), 1.0), detail::elementary()});
  for (double th : {0.0, 2.0}) o.rays.push_back({{std::cos(th), std::sin(th)}, {std::cos(th), std::sin(th)}, kInf, detail::elementary()});
  o.levels.push_back({2.0, 1, true, detail::elementary()});
  return s;
}

inline Scenario build_section7_dN(const ScenarioConfig& cfg = {}) {
  const DiskConstruction c = disk_construction(cfg.K, cfg.theta);
  Scenario s;
  s.name = "section7_dN";
  s.description = "distance from the unit disk with K accumulating disks removed";
  s.window_note = "[-6,6]^2; all removed disks lie within radius 3";
  s.config = cfg;
  s.field = dist_from_set(Metric::euclidean(), construction_set_N(c), detail::box(6));
  s.oracle.reconstruction = OracleReconstruction{0.0, std::nullopt, detail::elementary()};
  auto& o = s.oracle;
  for (Point2 p : c.p) {
    o.singular_points.push_back({p, SingularLabel::upper_singular, detail::construction()});
    o.upper_locus.push_back(p);
  }
  for (double t : {1.5, -1.5, 3.0, -3.0, 5.0, -5.0}) o.values.push_back({{t, 0}, std::abs(t) - 1, detail::construction()});
  for (int i = 0; i < c.K(); ++i)
    o.values.push_back({c.p[i], c.r[i], detail::independent("radius through (cos theta_i, sin theta_i)")});
  o.rays.push_back({{1, 0}, {1, 0}, kInf, detail::construction()});
  for (double th : {c.theta[0], c.theta[1], 2.0, 3.5, 5.0})
    o.rays.push_back({{std::cos(th), std::sin(th)}, {std::cos(th), std::sin(th)}, kInf, detail::construction()});
  return s;
}

inline ScalarField section7_eta_field(const DiskConstruction& c, const Window& w) {
  auto fn = [c](Point2 x) { return eta_limit(c, x); };
  return custom_field(Metric::euclidean(), w, {0.0, detail::sample_sup(w, fn)}, fn, "limit of n - d(x, C_n)");
}

inline Scenario build_section7_eta(const ScenarioConfig& cfg = {}) {
  const DiskConstruction c = disk_construction(cfg.K, cfg.theta);
  Scenario s;
  s.name = "section7_eta";
  s.description = "limit of n - d(x, C_n) for the mirrored disk sequence";
  s.window_note = "[-6,6]^2; the bumps accumulate at (2,0)";
  s.config = cfg;
  s.field = section7_eta_field(c, detail::box(6));
  auto& o = s.oracle;
  for (int i = 0; i < c.K(); ++i) {
    o.singular_points.push_back({c.u[i], SingularLabel::lower_singular, detail::construction()});
    o.singular_points.push_back({0.5 * c.u[i], SingularLabel::lower_singular, detail::construction()});
    for (Point2 q : detail::segment_samples({0, 0}, c.u[i], 0.01)) o.lower_locus.push_back(q);
    const double a0 = -c.theta[i], a1 = -c.theta[i + 1];
    o.rays.push_back({c.u[i], {std::cos(0.5 * (a0 + a1)), std::sin(0.5 * (a0 + a1))}, kInf, detail::construction()});
  }
  for (double x : {-4.0, -1.0, 0.0, 0.5, 2.0, 3.5}) o.values.push_back({{x, 0}, std::abs(x), detail::construction()});
  // Rays from o: theta in [0, 2 pi - theta_1] and the sector edges 2 pi - theta_i.
  for (double th : {0.0, 1.0, 3.0, 2 * std::numbers::pi - c.theta[0], -c.theta[1], -c.theta[2]})
    o.rays.push_back({{0, 0}, {std::cos(th), std::sin(th)}, kInf, detail::construction()});
  return s;
}

inline ScalarField section7_combined_field(const DiskConstruction& c, const Window& w) {
  const ScalarField dN = dist_from_set(Metric::euclidean(), construction_set_N(c), w);
  auto fn = [c, dN](Point2 x) { return x.y >= 0 ? dN(x) + 1 : std::max(eta_limit(c, x), 1.0); };
  return custom_field(Metric::euclidean(), w, {1.0, detail::sample_sup(w, fn)}, fn, "d_N + 1 above the axis, max(eta, 1) below");
}

inline Scenario build_section7_combined(const ScenarioConfig& cfg = {}) {
  const DiskConstruction c = disk_construction(cfg.K, cfg.theta);
  Scenario s;
  s.name = "section7_combined";
  s.description = "d_N + 1 glued along the x-axis to max(eta, 1)";
  s.window_note = "[-6,6]^2; the accumulation point (2,0) is well inside";
  s.config = cfg;
  s.field = section7_combined_field(c, detail::box(6));
  s.oracle.reconstruction = OracleReconstruction{1.0, Window{-6, 6, 0, 6, false}, detail::construction()};
  auto& o = s.oracle;
  for (int i = 0; i < c.K(); ++i) {
    o.singular_points.push_back({c.p[i], SingularLabel::upper_singular, detail::construction()});
    o.singular_points.push_back({c.u[i], SingularLabel::lower_singular, detail::construction()});
    o.upper_locus.push_back(c.p[i]);
    o.lower_locus.push_back(c.u[i]);
  }
  o.values.push_back({{3, 0}, 3.0, detail::construction()});
  o.values.push_back({{0, -5}, 5.0, detail::independent("eta closed form along the ray at -pi/2")});
  o.values.push_back({{0, 0}, 1.0, detail::construction()});
  o.rays.push_back({{1, 0}, {1, 0}, kInf, detail::construction()});
  return s;
}

inline DiskConstruction fab_construction(double a, double b, int K) {
  if (!(0 < a && a < b && b < std::numbers::pi / 2)) throw Error(ErrorCode::invalid_input, "need 0 < a < b < pi/2");
  std::vector<double> th;
  for (int i = 0; i <= K; ++i) th.push_back(0.5 * (b - a) * std::ldexp(1.0, -i));
  return disk_construction(K, th);
}

// Rotated p_i (upper) and u_i (lower) of a sector construction.
inline void add_fab_loci(OracleData& o, double a, double b, int K) {
  const DiskConstruction c = fab_construction(a, b, K);
  const double om = 0.5 * (a + b);
  for (int i = 0; i < K; ++i) {
    o.upper_locus.push_back(rotate(c.p[i], om));
    o.lower_locus.push_back(rotate(c.u[i], om));
  }
}

/// Rotation of the combined construction into the sector (a, b): angles halve from
/// (b - a) / 2 and the accumulation point moves to 2 (cos w, sin w), w = (a + b) / 2.
inline ScalarField fab_field(double a, double b, int K, const Window& w) {
  const DiskConstruction c = fab_construction(a, b, K);
  const ScalarField base = section7_combined_field(c, w);
  const double om = 0.5 * (a + b), co = std::cos(om), si = std::sin(om);
  auto fn = [base, co, si](Point2 x) { return base({co * x.x + si * x.y, -si * x.x + co * x.y}); };
  return custom_field(Metric::euclidean(), w, {1.0, base.range().sup}, fn, "combined construction rotated into (a, b)");
}

inline Scenario build_fab(const ScenarioConfig& cfg = {}) {
  Scenario s;
  s.name = "fab";
  s.description = "combined construction localized to the sector (a, b)";
  s.window_note = "[-6,6]^2";
  s.config = cfg;
  s.field = fab_field(cfg.a, cfg.b, cfg.K, detail::box(6));
  const double om = 0.5 * (cfg.a + cfg.b);
  auto& o = s.oracle;
  o.values.push_back({{3, 0}, 3.0, detail::construction()});
  for (double th : {0.0, cfg.a, cfg.b, 2.0, 4.0})
    o.rays.push_back({{std::cos(th), std::sin(th)}, {std::cos(th), std::sin(th)}, kInf, detail::construction()});
  o.singular_points.push_back({{2 * std::cos(om), 2 * std::sin(om)}, SingularLabel::regular, detail::construction()});
  add_fab_loci(o, cfg.a, cfg.b, cfg.K);
  return s;
}

/// Sectors (eps_{n+1}, eps_n) each carrying its own f_ab; max(|x|, 1) elsewhere.
inline Scenario build_fab_stack(const ScenarioConfig& cfg = {}) {
  std::vector<double> eps = cfg.stack_eps.empty() ? std::vector<double>{1.2, 0.6, 0.3, 0.15} : cfg.stack_eps;
  if (eps.size() < 2 || !(eps[0] < std::numbers::pi / 2)) throw Error(ErrorCode::invalid_input, "bad sector sequence");
  const Window w = detail::box(6);
  std::vector<ScalarField> parts;
  for (std::size_t n = 0; n + 1 < eps.size(); ++n) {
    if (!(eps[n + 1] > 0 && eps[n + 1] < eps[n])) throw Error(ErrorCode::invalid_input, "sectors must strictly decrease");
    parts.push_back(fab_field(eps[n + 1], eps[n], cfg.K, w));
  }
  auto fn = [eps, parts](Point2 x) {
    double ang = std::atan2(x.y, x.x);
    if (ang < 0) ang += 2 * std::numbers::pi;
    for (std::size_t n = 0; n < parts.size(); ++n)
      if (ang <= eps[n] && ang >= eps[n + 1]) return parts[n](x);
    return std::max(norm(x), 1.0);
  };
  Scenario s;
  s.name = "fab_stack";
  s.description = "several localized constructions in disjoint sectors";
  s.window_note = "[-6,6]^2";
  s.config = cfg;
  s.config.stack_eps = eps;
  s.field = custom_field(Metric::euclidean(), w, {1.0, detail::sample_sup(w, fn)}, fn, "stacked sector constructions");
  auto& o = s.oracle;
  for (std::size_t n = 0; n + 1 < eps.size(); ++n) {
    const double om = 0.5 * (eps[n] + eps[n + 1]);
    o.singular_points.push_back({{2 * std::cos(om), 2 * std::sin(om)}, SingularLabel::regular, detail::construction()});
    add_fab_loci(o, eps[n + 1], eps[n], cfg.K);
  }
  o.rays.push_back({{1, 0}, {1, 0}, kInf, detail::construction()});
  o.rays.push_back({{-1, 0}, {-1, 0}, kInf, detail::construction()});
  return s;
}

// --------------------------------------------------------------------------
// Registry

using ScenarioBuilder = std::function<Scenario(const ScenarioConfig&)>;

inline const std::map<std::string, ScenarioBuilder>& scenario_registry() {
  static const std::map<std::string, ScenarioBuilder> reg{
      {"euclidean_point", build_euclidean_point}, {"busemann_x", build_busemann_x},
      {"randers_wind", build_randers_wind},       {"flat_torus", build_flat_torus},
      {"two_point_dN", build_two_point_dN},       {"disk_plus_one", build_disk_plus_one},
      {"section7_dN", build_section7_dN},         {"section7_eta", build_section7_eta},
      {"section7_combined", build_section7_combined}, {"fab", build_fab},
      {"fab_stack", build_fab_stack},
  };
  return reg;
}

inline std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : scenario_registry()) out.push_back(k);
  return out;
}

inline bool has_scenario(const std::string& name) { return scenario_registry().count(name) > 0; }

inline Scenario make_scenario(const std::string& name, const ScenarioConfig& cfg = {}) {
  const auto& reg = scenario_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw Error(ErrorCode::invalid_input, "unknown scenario: " + name);
  return it->second(cfg);
}

}  // namespace singloc
