// SPDX-License-Identifier: Apache-2.0
//
// Geodesic integration (the exponential map), the first variation of length,
// point-to-point distances and enumeration of minimal segments.

#ifndef SINGLOC_GEODESIC_HPP_
#define SINGLOC_GEODESIC_HPP_

#include <optional>
#include <ostream>
#include <vector>

#include "singloc/core.hpp"
#include "singloc/metric.hpp"

namespace singloc {

struct GeodesicSample {
  double t = 0.0;
  Point2 pos;
  Vec2 vel;
};

/// A unit-speed geodesic sampled on [t0, t1].
struct GeodesicSegment {
  std::string metric_name;
  Point2 start;
  Vec2 start_dir;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<GeodesicSample> samples;
  bool truncated = false;  // left the computational window before the requested length

  double length() const { return t1 - t0; }
  Point2 end() const { return samples.empty() ? start : samples.back().pos; }
  Vec2 end_dir() const { return samples.empty() ? start_dir : samples.back().vel; }
};

namespace detail {

struct GeoState {
  Point2 x;
  Vec2 v;
};

inline GeoState rk4_step(const Metric& m, GeoState s, double h) {
  auto deriv = [&](const GeoState& q) { return GeoState{q.v, m.spray(q.x, q.v)}; };
  const GeoState k1 = deriv(s);
  const GeoState k2 = deriv({s.x + 0.5 * h * k1.x, s.v + 0.5 * h * k1.v});
  const GeoState k3 = deriv({s.x + 0.5 * h * k2.x, s.v + 0.5 * h * k2.v});
  const GeoState k4 = deriv({s.x + h * k3.x, s.v + h * k3.v});
  return {s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

inline GeoState flow(const Metric& m, GeoState s, double t, double step) {
  if (m.straight_geodesics()) return {s.x + t * s.v, s.v};
  const int n = std::max(1, static_cast<int>(std::ceil(t / step)));
  const double h = t / n;
  for (int i = 0; i < n; ++i) s = rk4_step(m, s, h);
  return s;
}

}  // namespace detail

inline constexpr double kDefaultGeodesicStep = 1e-3;

/// exp_p(t v) for an F-unit v.
inline Point2 geodesic_point(const Metric& m, Point2 p, Vec2 v, double t, double step = kDefaultGeodesicStep) {
  return detail::flow(m, {p, v}, t, step).x;
}

/// The state (point, velocity) at time t along the geodesic with initial velocity v.
inline std::pair<Point2, Vec2> geodesic_state(const Metric& m, Point2 p, Vec2 v, double t,
                                              double step = kDefaultGeodesicStep) {
  const auto s = detail::flow(m, {p, v}, t, step);
  return {s.x, s.v};
}

/// The point q such that the geodesic leaving q reaches p after time t with velocity v.
inline Point2 geodesic_point_before(const Metric& m, Point2 p, Vec2 v, double t, double step = kDefaultGeodesicStep) {
  if (m.straight_geodesics()) return p - t * v;
  return detail::flow(m.reverse(), {p, -v}, t, step).x;
}

/// Integrates the unit-speed geodesic from `start` with F-unit direction `dir` over [0, length].
/// When `window` is given, the trajectory is truncated at its first exit and flagged.
inline GeodesicSegment integrate_geodesic(const Metric& m, Point2 start, Vec2 dir, double length, double step,
                                          std::optional<Window> window = std::nullopt) {
  if (!(step > 0) || !(length > 0)) throw Error(ErrorCode::invalid_input, "step and length must be positive");
  if (!is_finite(start) || !is_finite(dir)) throw Error(ErrorCode::invalid_input, "non-finite start or direction");
  if (std::abs(m.norm(start, dir) - 1.0) > 1e-9) throw Error(ErrorCode::invalid_input, "direction is not F-unit");
  GeodesicSegment seg;
  seg.metric_name = m.name();
  seg.start = start;
  seg.start_dir = dir;
  const int n = std::max(1, static_cast<int>(std::ceil(length / step - 1e-9)));
  const double h = length / n;
  seg.samples.reserve(n + 1);
  detail::GeoState s{start, dir};
  seg.samples.push_back({0.0, start, dir});
  for (int i = 1; i <= n; ++i) {
    const double t = i * h;
    detail::GeoState next = m.straight_geodesics() ? detail::GeoState{start + t * dir, dir} : detail::rk4_step(m, s, h);
    if (window && !window->contains(next.x)) {
      seg.truncated = true;
      break;
    }
    s = next;
    seg.samples.push_back({t, s.x, s.v});
  }
  seg.t1 = seg.samples.back().t;
  return seg;
}

/// Largest |F(γ, γ') - 1| over the samples.
inline double unit_speed_defect(const Metric& m, const GeodesicSegment& seg) {
  double worst = 0.0;
  for (const auto& s : seg.samples) worst = std::max(worst, std::abs(m.norm(s.pos, s.vel) - 1.0));
  return worst;
}

/// Variation field U along a geodesic, one vector per sample.
struct VariationProbe {
  GeodesicSegment base;
  std::vector<Vec2> field;
};

/// Derivative of length for a variation of a geodesic: the boundary terms
/// g_{γ'(b)}(γ'(b), U(b)) - g_{γ'(a)}(γ'(a), U(a)).
inline double first_variation(const Metric& m, const VariationProbe& probe) {
  const auto& s = probe.base.samples;
  if (s.empty() || probe.field.size() != s.size())
    throw Error(ErrorCode::invalid_input, "variation field must have one vector per sample");
  auto term = [&](const GeodesicSample& g, Vec2 u) {
    if (u.x == 0.0 && u.y == 0.0) return 0.0;
    return m.fundamental_tensor(g.pos, g.vel).bilinear(g.vel, u);
  };
  return term(s.back(), probe.field.back()) - term(s.front(), probe.field.front());
}

enum class DistanceMethod { analytic, shooting, grid_marching };

inline const char* to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::analytic: return "analytic";
    case DistanceMethod::shooting: return "shooting";
    case DistanceMethod::grid_marching: return "grid-marching";
  }
  return "unknown";
}

struct DistanceOptions {
  int starts = 64;
  double residual_tol = 1e-7;
  int max_newton = 40;
  double step = kDefaultGeodesicStep;
  double angle_tol = 1e-2;
  double length_tol = 1e-5;
  bool want_minimizers = true;
};

struct DistanceResult {
  double value = 0.0;
  std::vector<GeodesicSegment> minimizers;
  DistanceMethod method = DistanceMethod::analytic;
  bool approximate = false;
  double lower_bound = 0.0;  // equals value unless approximate
};

namespace detail {

inline GeodesicSegment straight_segment(const Metric& m, Point2 p, Vec2 chart_disp, double step) {
  const double len = m.norm(p, chart_disp);
  return integrate_geodesic(m, p, chart_disp / len, len, std::min(step, len));
}

struct ShotSolution {
  double theta;
  double length;
};

// Newton iteration on the endpoint map (theta, L) -> exp_p(L u_theta) - q.
inline std::optional<ShotSolution> shoot(const Metric& m, Point2 p, Point2 q, double theta, double len,
                                         const DistanceOptions& opt) {
  auto endpoint = [&](double th, double l) {
    const Vec2 u = m.normalize(p, unit_angle(th));
    return geodesic_point(m, p, u, l, opt.step);
  };
  for (int it = 0; it < opt.max_newton; ++it) {
    const Vec2 r = endpoint(theta, len) - q;
    if (norm(r) < opt.residual_tol) return ShotSolution{theta, len};
    const double e = 1e-7;
    const Vec2 jt = (endpoint(theta + e, len) - endpoint(theta - e, len)) / (2 * e);
    const Vec2 jl = (endpoint(theta, len + e) - endpoint(theta, std::max(0.0, len - e))) / (len > e ? 2 * e : e + len);
    const Mat2 J{jt.x, jl.x, jt.y, jl.y};
    if (std::abs(J.det()) < 1e-14) return std::nullopt;
    Vec2 delta = J.inverse() * r;
    // Damped step keeps the length positive.
    double s = 1.0;
    while (len - s * delta.y <= 0 && s > 1e-6) s *= 0.5;
    theta -= s * delta.x;
    len -= s * delta.y;
    if (!(len > 0) || !std::isfinite(theta)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// All minimal segments from p to q whose lengths lie within length_tol of the
/// distance, deduplicated by initial direction.
inline std::vector<GeodesicSegment> minimal_segments(const Metric& m, Point2 p, Point2 q, double angle_tol = 1e-2,
                                                     double length_tol = 1e-5, const DistanceOptions& opt = {});

inline DistanceResult distance(const Metric& m, Point2 p, Point2 q, const DistanceOptions& opt = {}) {
  if (!is_finite(p) || !is_finite(q)) throw Error(ErrorCode::invalid_input, "non-finite point");
  DistanceResult res;
  if (m.has_analytic_distance()) {
    res.method = DistanceMethod::analytic;
    res.value = m.analytic_distance(p, q);
    res.lower_bound = res.value;
    if (opt.want_minimizers && res.value > 0) res.minimizers = minimal_segments(m, p, q, opt.angle_tol, opt.length_tol, opt);
    return res;
  }
  res.method = DistanceMethod::shooting;
  if (p == q) return res;
  std::vector<detail::ShotSolution> sols;
  const double guess = m.norm(p, q - p);
  for (int k = 0; k < opt.starts; ++k) {
    const double th = angle_of(q - p) + 2 * kPi * k / opt.starts;
    if (auto s = detail::shoot(m, p, q, th, guess, opt)) sols.push_back(*s);
  }
  if (sols.empty()) {
    // Fall back to the chart segment: an admissible curve, hence an upper bound.
    res.approximate = true;
    constexpr int kPieces = 256;
    double len = 0.0;
    for (int i = 0; i < kPieces; ++i) {
      const Point2 a = p + (static_cast<double>(i) + 0.5) / kPieces * (q - p);
      len += m.norm(a, (q - p) / kPieces);
    }
    res.value = len;
    res.lower_bound = 0.0;
    return res;
  }
  double best = kInf;
  for (const auto& s : sols) best = std::min(best, s.length);
  res.value = best;
  res.lower_bound = best;
  if (opt.want_minimizers) {
    std::vector<double> kept;
    for (const auto& s : sols) {
      if (s.length > best + opt.length_tol) continue;
      const Vec2 u = m.normalize(p, unit_angle(s.theta));
      const double th = angle_of(u);
      bool dup = false;
      for (double k : kept) dup = dup || std::abs(angle_diff(k, th)) <= opt.angle_tol;
      if (dup) continue;
      kept.push_back(th);
      res.minimizers.push_back(integrate_geodesic(m, p, u, s.length, std::min(opt.step, s.length)));
    }
  }
  return res;
}

inline std::vector<GeodesicSegment> minimal_segments(const Metric& m, Point2 p, Point2 q, double angle_tol,
                                                     double length_tol, const DistanceOptions& opt) {
  if (p == q) throw Error(ErrorCode::invalid_input, "minimal_segments needs distinct points");
  std::vector<GeodesicSegment> out;
  if (!m.has_analytic_distance()) {
    DistanceOptions o = opt;
    o.angle_tol = angle_tol;
    o.length_tol = length_tol;
    o.want_minimizers = true;
    return distance(m, p, q, o).minimizers;
  }
  if (!m.periodic()) {
    out.push_back(detail::straight_segment(m, p, q - p, opt.step));
    return out;
  }
  const auto [lx, ly] = m.periods();
  const double best = m.analytic_distance(p, q);
  const Vec2 base = m.torus_displacement(p, q);
  std::vector<double> kept;
  for (int i = -3; i <= 3; ++i) {
    for (int j = -3; j <= 3; ++j) {
      const Vec2 d = base + Vec2{i * lx, j * ly};
      if (norm(d) > best + length_tol) continue;
      const double th = angle_of(d);
      bool dup = false;
      for (double k : kept) dup = dup || std::abs(angle_diff(k, th)) <= angle_tol;
      if (dup) continue;
      kept.push_back(th);
      out.push_back(detail::straight_segment(m, p, d, opt.step));
    }
  }
  return out;
}

/// CSV with header t,x,y,vx,vy.
inline void write_segment_csv(std::ostream& os, const GeodesicSegment& seg) {
  os << "t,x,y,vx,vy\n";
  os.precision(12);
  for (const auto& s : seg.samples) os << s.t << ',' << s.pos.x << ',' << s.pos.y << ',' << s.vel.x << ',' << s.vel.y << '\n';
}

}  // namespace singloc

#endif  // SINGLOC_GEODESIC_HPP_
