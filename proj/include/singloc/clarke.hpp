// SPDX-License-Identifier: Apache-2.0
// Generalized differentials, critical points, critical-value covers and level sets.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "singloc/singular.hpp"

namespace singloc {

struct Covector2 {
  Point2 base;
  Vec2 components;  // action on chart vectors
};

/// Covector v -> g_w(w, v) of an F-unit velocity w at p.
inline Covector2 velocity_covector(const Metric& m, Point2 p, Vec2 w) { return {p, m.legendre_covector(p, w)}; }

namespace detail {

inline double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return norm(a - b) < 1e-12; }), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-15) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-15) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double L2 = dot(d, d);
  const double t = L2 > 0 ? std::clamp(dot(q - a, d) / L2, 0.0, 1.0) : 0.0;
  return norm(q - (a + t * d));
}

}  // namespace detail

struct ClarkeDifferential {
  Point2 base;
  std::vector<Covector2> generators;
  std::vector<Vec2> hull;  // counter-clockwise; a point or segment when degenerate

  /// Euclidean distance in covector coordinates from the zero covector to the hull.
  double distance_to_zero() const {
    const Vec2 z{0, 0};
    if (hull.empty()) return kInf;
    if (hull.size() == 1) return norm(hull[0]);
    if (hull.size() == 2) return detail::point_segment_distance(z, hull[0], hull[1]);
    bool inside = true;
    double best = kInf;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()];
      inside = inside && detail::cross(a, b, z) >= 0;
      best = std::min(best, detail::point_segment_distance(z, a, b));
    }
    return inside ? 0.0 : best;
  }
};

/// Hull of the covectors of all incoming and outgoing fan velocities at the fan's point.
inline ClarkeDifferential generalized_differential(const Metric& m, const DirectionFan& fan, double angle_tol = 1e-3) {
  std::vector<Vec2> dirs = fan.incoming_dirs;
  dirs.insert(dirs.end(), fan.outgoing_dirs.begin(), fan.outgoing_dirs.end());
  if (dirs.empty()) throw Error(ErrorCode::almost_distance_violation, "empty direction fan");
  std::sort(dirs.begin(), dirs.end(), [](Vec2 a, Vec2 b) { return angle_of(a) < angle_of(b); });
  std::vector<Vec2> kept;
  for (Vec2 d : dirs)
    if (kept.empty() || std::abs(angle_diff(angle_of(d), angle_of(kept.back()))) > angle_tol) kept.push_back(d);
  if (kept.size() > 1 && std::abs(angle_diff(angle_of(kept.front()), angle_of(kept.back()))) <= angle_tol) kept.pop_back();
  ClarkeDifferential cd;
  cd.base = fan.point;
  std::vector<Vec2> comps;
  for (Vec2 d : kept) {
    cd.generators.push_back(velocity_covector(m, fan.point, d));
    comps.push_back(cd.generators.back().components);
  }
  cd.hull = detail::convex_hull(std::move(comps));
  return cd;
}

inline ClarkeDifferential generalized_differential(const ScalarField& f, Point2 p, const FanOptions& o = {}) {
  return generalized_differential(f.metric(), direction_fan(f, p, o));
}

inline bool is_critical(const ClarkeDifferential& cd, double tol = 1e-3) { return cd.distance_to_zero() <= tol; }

// --------------------------------------------------------------------------
// Critical values

struct CriticalPoint {
  Point2 point;
  double value = 0.0;
  double hull_distance = 0.0;
};

struct CoverStep {
  double cover_width = 0.0;
  double bound = 0.0;
};

struct CriticalValueEstimate {
  std::vector<CriticalPoint> points;
  std::vector<double> values;  // sorted
  double cover_width = 0.0;
  double measure_upper_bound = 0.0;
  std::vector<CoverStep> history;  // cover_width halved at each step
  int grid_n = 0;
  std::size_t undetermined = 0;
  std::size_t window_exit = 0;
};

/// Total length of the union of the intervals [v - width/2, v + width/2].
inline double cover_length(std::vector<double> values, double width) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  // Sum per overlapping cluster as (last - first) + width so isolated values give width exactly.
  double total = 0, first = values.front();
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] - values[k - 1] > width) {
      total += (values[k - 1] - first) + width;
      first = values[k];
    }
  return total + (values.back() - first) + width;
}

struct CriticalOptions {
  ClassifyOptions classify;  // delta <= 0 means the grid spacing
  double tol = 1e-3;
  int refinements = 3;
};

inline void finish_cover(CriticalValueEstimate& e, double width, int refinements) {
  e.values.clear();
  for (const auto& c : e.points) e.values.push_back(c.value);
  std::sort(e.values.begin(), e.values.end());
  e.cover_width = width;
  e.measure_upper_bound = cover_length(e.values, width);
  double w = width;
  for (int k = 0; k < std::max(1, refinements); ++k, w *= 0.5) e.history.push_back({w, cover_length(e.values, w)});
}

/// Criticality test at one point; false for regular, range-boundary and window-exit
/// points and where f attains its infimum.
inline std::optional<CriticalPoint> critical_at(const ScalarField& f, Point2 p, const ClassifyOptions& co, double tol,
                                                bool* undetermined = nullptr, bool* truncated = nullptr) {
  FanOptions fo;
  fo.delta = co.delta;
  if (f(p) <= f.range().inf + certification_tolerance(f, fan_delta(f, fo))) return std::nullopt;
  const PointClass pc = classify_point(f, p, co);
  if (truncated) *truncated = pc.window_exit;
  if (pc.window_exit || pc.label == SingularLabel::regular || pc.label == SingularLabel::range_boundary)
    return std::nullopt;
  if (pc.label == SingularLabel::undetermined && pc.fan.incoming_dirs.empty() && pc.fan.outgoing_dirs.empty()) {
    if (undetermined) *undetermined = true;
    return std::nullopt;
  }
  const ClarkeDifferential cd = generalized_differential(f.metric(), pc.fan);
  const double d0 = cd.distance_to_zero();
  if (d0 > tol) return std::nullopt;
  return CriticalPoint{p, f(p), d0};
}

/// Classifies the grid nodes, collects values at critical ones and covers them by
/// intervals of width cover_width.
inline CriticalValueEstimate estimate_critical_values(const ScalarField& f, int grid_n, double cover_width,
                                                      CriticalOptions o = {}) {
  if (grid_n < 16) throw Error(ErrorCode::invalid_input, "grid_n must be >= 16");
  if (!(cover_width > 0)) throw Error(ErrorCode::invalid_input, "cover width must be positive");
  const GridField geo(f.window(), grid_n);
  if (o.classify.delta <= 0) o.classify.delta = geo.spacing();
  CriticalValueEstimate e;
  e.grid_n = grid_n;
  for (int j = 0; j < geo.ny(); ++j)
    for (int i = 0; i < geo.nx(); ++i) {
      bool und = false, trunc = false;
      if (auto c = critical_at(f, geo.node(i, j), o.classify, o.tol, &und, &trunc)) e.points.push_back(*c);
      e.undetermined += und;
      e.window_exit += trunc;
    }
  finish_cover(e, cover_width, o.refinements);
  return e;
}

/// Per-edge critical-value covers along an extracted singular graph, sampled at the
/// graph spacing.
inline std::vector<CriticalValueEstimate> edge_critical_covers(const ScalarField& f, const SingularGraph& g,
                                                               double cover_width, CriticalOptions o = {}) {
  if (o.classify.delta <= 0) o.classify.delta = g.spacing;
  std::vector<CriticalValueEstimate> out;
  for (const auto& e : g.edges) {
    CriticalValueEstimate est;
    for (std::size_t k = 0; k + 1 < e.polyline.size(); ++k) {
      const Point2 a = e.polyline[k], b = e.polyline[k + 1];
      const int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / g.spacing)));
      for (int s = 0; s <= n; ++s) {
        if (s == n && k + 2 < e.polyline.size()) continue;
        bool und = false, trunc = false;
        const Point2 p = g.window.wrap(a + (static_cast<double>(s) / n) * (b - a));
        if (auto c = critical_at(f, p, o.classify, o.tol, &und, &trunc)) est.points.push_back(*c);
        est.undetermined += und;
        est.window_exit += trunc;
      }
    }
    finish_cover(est, cover_width, o.refinements);
    out.push_back(std::move(est));
  }
  return out;
}

// --------------------------------------------------------------------------
// Chain rule along curves in the singular locus

struct ChainRuleReport {
  double derivative = 0.0;  // (f o c)'(t0)
  std::vector<double> covector_values;  // omega(c'(t0)) per fan velocity
  double residual = 0.0;
};

/// Compares (f o c)'(t0) with the covector of every fan velocity at c(t0) applied to c'(t0).
inline ChainRuleReport chain_rule_check(const ScalarField& f, const std::function<Point2(double)>& c, double t0,
                                        double h = 1e-6, const FanOptions& fo = {}) {
  if (!(h > 0)) throw Error(ErrorCode::invalid_input, "step must be positive");
  const Window& w = f.window();
  const Point2 p = w.wrap(c(t0));
  const Vec2 tangent = w.displacement(c(t0 - h), c(t0 + h)) / (2 * h);
  ChainRuleReport r;
  r.derivative = (f(w.wrap(c(t0 + h))) - f(w.wrap(c(t0 - h)))) / (2 * h);
  const DirectionFan fan = direction_fan(f, p, fo);
  std::vector<Vec2> dirs = fan.incoming_dirs;
  dirs.insert(dirs.end(), fan.outgoing_dirs.begin(), fan.outgoing_dirs.end());
  if (dirs.empty()) throw Error(ErrorCode::almost_distance_violation, "empty direction fan");
  for (Vec2 d : dirs) {
    const double v = dot(f.metric().legendre_covector(p, d), tangent);
    r.covector_values.push_back(v);
    r.residual = std::max(r.residual, std::abs(r.derivative - v));
  }
  return r;
}

/// Polyline parametrized by Euclidean arclength.
inline std::function<Point2(double)> arclength_curve(std::vector<Point2> poly) {
  if (poly.size() < 2) throw Error(ErrorCode::invalid_input, "polyline needs two points");
  std::vector<double> s{0.0};
  for (std::size_t k = 1; k < poly.size(); ++k) s.push_back(s.back() + norm(poly[k] - poly[k - 1]));
  return [poly = std::move(poly), s = std::move(s)](double t) {
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), t) - s.begin()), s.size() - 1);
    const std::size_t a = k == 0 ? 0 : k - 1;
    const double len = s[a + 1] - s[a];
    const double u = len > 0 ? (t - s[a]) / len : 0.0;
    return poly[a] + u * (poly[a + 1] - poly[a]);
  };
}

// --------------------------------------------------------------------------
// Level sets

struct LevelComponent {
  std::vector<Point2> polyline;  // wrapped into the window
  bool closed = false;
  bool regular = false;  // no critical node within two cells
  bool simple = false;
};

struct LevelSet {
  double value = 0.0;
  int grid_n = 0;
  double spacing = 0.0;
  std::vector<LevelComponent> components;
  double max_residual = 0.0;  // max |f - t| over polyline points
  double min_separation = kInf;  // between distinct regular components
  bool disjoint = true;  // regular components at least one cell apart
  std::size_t regular_count() const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(), [](const LevelComponent& c) { return c.regular; }));
  }
};

namespace detail {

inline double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(a, b, c), d2 = cross(a, b, d), d3 = cross(c, d, a), d4 = cross(c, d, b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
  return std::min({point_segment_distance(c, a, b), point_segment_distance(d, a, b), point_segment_distance(a, c, d),
                   point_segment_distance(b, c, d)});
}

// Segment pair distance with the second segment moved next to the first on a torus.
inline double segment_distance(const Window& w, Point2 a, Point2 b, Point2 c, Point2 d) {
  const Point2 b1 = a + w.displacement(a, b);
  const Point2 c1 = a + w.displacement(a, c);
  const Point2 d1 = c1 + w.displacement(c, d);
  return segment_distance(a, b1, c1, d1);
}

}  // namespace detail

struct LevelSetOptions {
  CriticalOptions critical;
};

/// Marching-squares contour of f at t; saddle cells are resolved by the cell-center average.
inline LevelSet extract_level_set(const ScalarField& f, int grid_n, double t, LevelSetOptions o = {}) {
  if (grid_n < 16) throw Error(ErrorCode::invalid_input, "grid_n must be >= 16");
  const Range r = f.range();
  if (!(t > r.inf && t < r.sup)) throw Error(ErrorCode::domain_error, "level outside the range interior");
  const Window& w = f.window();
  const GridField geo(w, grid_n);
  const int nx = geo.nx(), ny = geo.ny();
  const double h = geo.spacing();
  if (o.critical.classify.delta <= 0) o.critical.classify.delta = h;
  std::vector<double> val(geo.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) val[geo.index(i, j)] = f(geo.node(i, j));
  auto wi = [&](int i) { return w.periodic ? (i % nx + nx) % nx : i; };
  auto wj = [&](int j) { return w.periodic ? (j % ny + ny) % ny : j; };
  auto above = [&](int i, int j) { return val[geo.index(wi(i), wj(j))] >= t; };
  // Edge ids: 2 * node for the edge to (i+1, j), 2 * node + 1 for the edge to (i, j+1).
  std::map<std::size_t, Point2> crossing;
  auto edge_point = [&](int i, int j, bool vertical) {
    const std::size_t id = 2 * geo.index(wi(i), wj(j)) + (vertical ? 1 : 0);
    if (!crossing.count(id)) {
      const double va = val[geo.index(wi(i), wj(j))];
      const double vb = vertical ? val[geo.index(wi(i), wj(j + 1))] : val[geo.index(wi(i + 1), wj(j))];
      const double u = std::clamp((t - va) / (vb - va), 0.0, 1.0);
      const Point2 a = geo.node(i, j);
      const Vec2 step = vertical ? Vec2{0, (w.ymax - w.ymin) / (w.periodic ? ny : ny - 1)}
                                 : Vec2{(w.xmax - w.xmin) / (w.periodic ? nx : nx - 1), 0};
      crossing[id] = w.wrap(a + u * step);
    }
    return id;
  };
  std::map<std::size_t, std::vector<std::size_t>> adj;
  std::map<std::size_t, std::pair<int, int>> edge_node;
  auto link = [&](std::size_t a, std::size_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  const int ci = w.periodic ? nx : nx - 1, cj = w.periodic ? ny : ny - 1;
  for (int j = 0; j < cj; ++j)
    for (int i = 0; i < ci; ++i) {
      const bool A = above(i, j), B = above(i + 1, j), C = above(i + 1, j + 1), D = above(i, j + 1);
      std::vector<std::size_t> ids;  // crossings in order bottom, right, top, left
      std::size_t e[4];
      bool has[4] = {A != B, B != C, C != D, D != A};
      if (has[0]) e[0] = edge_point(i, j, false), edge_node[e[0]] = {i, j};
      if (has[1]) e[1] = edge_point(i + 1, j, true), edge_node[e[1]] = {i + 1, j};
      if (has[2]) e[2] = edge_point(i, j + 1, false), edge_node[e[2]] = {i, j + 1};
      if (has[3]) e[3] = edge_point(i, j, true), edge_node[e[3]] = {i, j};
      for (int k = 0; k < 4; ++k)
        if (has[k]) ids.push_back(e[k]);
      if (ids.size() == 2) {
        link(ids[0], ids[1]);
      } else if (ids.size() == 4) {
        const double center = 0.25 * (val[geo.index(wi(i), wj(j))] + val[geo.index(wi(i + 1), wj(j))] +
                                      val[geo.index(wi(i + 1), wj(j + 1))] + val[geo.index(wi(i), wj(j + 1))]);
        if (A == (center >= t)) {
          link(e[0], e[1]);
          link(e[2], e[3]);
        } else {
          link(e[3], e[0]);
          link(e[1], e[2]);
        }
      }
    }

  LevelSet ls;
  ls.value = t;
  ls.grid_n = grid_n;
  ls.spacing = h;
  std::map<std::size_t, char> seen;
  std::vector<std::vector<std::size_t>> chains;
  auto walk = [&](std::size_t start) {
    std::vector<std::size_t> chain{start};
    seen[start] = 1;
    std::size_t cur = start;
    while (true) {
      std::size_t next = cur;
      for (std::size_t n : adj[cur])
        if (!seen[n]) {
          next = n;
          break;
        }
      if (next == cur) break;
      seen[next] = 1;
      chain.push_back(next);
      cur = next;
    }
    return chain;
  };
  for (auto& [id, nb] : adj)
    if (nb.size() == 1 && !seen[id]) chains.push_back(walk(id));
  std::vector<char> closed_flags(chains.size(), 0);
  for (auto& [id, nb] : adj)
    if (!seen[id]) {
      chains.push_back(walk(id));
      closed_flags.push_back(1);
    }

  std::map<std::size_t, bool> critical_node;
  auto node_critical = [&](int i, int j) {
    if (!w.periodic && (i < 0 || j < 0 || i >= nx || j >= ny)) return false;
    const std::size_t k = geo.index(wi(i), wj(j));
    auto it = critical_node.find(k);
    if (it != critical_node.end()) return it->second;
    const bool c = critical_at(f, geo.node(wi(i), wj(j)), o.critical.classify, o.critical.tol).has_value();
    critical_node[k] = c;
    return c;
  };
  for (std::size_t c = 0; c < chains.size(); ++c) {
    LevelComponent comp;
    comp.closed = closed_flags[c];
    for (std::size_t id : chains[c]) comp.polyline.push_back(crossing[id]);
    if (comp.closed) comp.polyline.push_back(comp.polyline.front());
    comp.regular = true;
    for (std::size_t id : chains[c]) {
      const auto [i0, j0] = edge_node[id];
      for (int dj = -2; dj <= 3 && comp.regular; ++dj)
        for (int di = -2; di <= 3 && comp.regular; ++di)
          if (node_critical(i0 + di, j0 + dj)) comp.regular = false;
    }
    for (Point2 q : comp.polyline) ls.max_residual = std::max(ls.max_residual, std::abs(f(q) - t));
    // Simplicity: non-adjacent segments must keep apart.
    const auto& P = comp.polyline;
    const std::size_t S = P.size() - 1;
    comp.simple = true;
    for (std::size_t a = 0; a < S && comp.simple; ++a)
      for (std::size_t b = a + 2; b < S && comp.simple; ++b) {
        if (comp.closed && a == 0 && b == S - 1) continue;
        if (detail::segment_distance(w, P[a], P[a + 1], P[b], P[b + 1]) < 1e-9 * h) comp.simple = false;
      }
    ls.components.push_back(std::move(comp));
  }
  for (std::size_t a = 0; a < ls.components.size(); ++a)
    for (std::size_t b = a + 1; b < ls.components.size(); ++b) {
      const auto& A = ls.components[a];
      const auto& B = ls.components[b];
      if (!A.regular || !B.regular) continue;
      for (std::size_t x = 0; x + 1 < A.polyline.size(); ++x)
        for (std::size_t y = 0; y + 1 < B.polyline.size(); ++y)
          ls.min_separation = std::min(
              ls.min_separation, detail::segment_distance(w, A.polyline[x], A.polyline[x + 1], B.polyline[y], B.polyline[y + 1]));
    }
  ls.disjoint = ls.min_separation >= h;
  return ls;
}

}  // namespace singloc
