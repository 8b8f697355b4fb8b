// SPDX-License-Identifier: Apache-2.0
//
// Singular locus of a 1-Lipschitz field: point classification, grid extraction
// into a graph, intrinsic distances along the locus, local-tree verification, and
// the local comparisons with sublevel cut loci, distance reconstruction and
// limit inequalities.

#ifndef SINGLOC_SINGULAR_HPP_
#define SINGLOC_SINGULAR_HPP_

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "singloc/core.hpp"
#include "singloc/fgeod.hpp"
#include "singloc/field.hpp"
#include "singloc/grid_field.hpp"

namespace singloc {

enum class SingularLabel { regular, upper_singular, lower_singular, range_boundary, undetermined };

inline const char* to_string(SingularLabel l) {
  switch (l) {
    case SingularLabel::regular: return "regular";
    case SingularLabel::upper_singular: return "upper-singular";
    case SingularLabel::lower_singular: return "lower-singular";
    case SingularLabel::range_boundary: return "range-boundary";
    case SingularLabel::undetermined: return "undetermined";
  }
  return "unknown";
}

struct PointClass {
  SingularLabel label = SingularLabel::undetermined;
  DirectionFan fan;
  int in_count = 0;
  int out_count = 0;
  bool fast_path = false;  // decided by the local search around the gradient
  bool window_exit = false;  // a probe stub may leave a non-periodic window; label unreliable
};

struct ClassifyOptions {
  double delta = 0.0;  // probe length; <= 0 means 1% of the window diagonal
  int angular_res = 720;
  double tol_rel = 1e-6;
  bool fast = true;
  double fast_half_width = 0.25;  // radians searched around the gradient direction
};

namespace detail {

inline bool smooth_pair(const ScalarField& f, const DirectionFan& fan, int angular_res) {
  const double tol = f.accuracy() > 0 ? 0.1 : 4.0 * 2 * kPi / angular_res;
  for (Vec2 a : fan.incoming_dirs)
    for (Vec2 b : fan.outgoing_dirs)
      if (std::abs(angle_diff(angle_of(a), angle_of(b))) <= tol) return true;
  return false;
}

inline PointClass label_from_fan(const ScalarField& f, Point2 p, DirectionFan fan, int angular_res) {
  PointClass pc;
  pc.in_count = static_cast<int>(fan.incoming_dirs.size());
  pc.out_count = static_cast<int>(fan.outgoing_dirs.size());
  if (pc.in_count > 0 && pc.out_count > 0) {
    pc.label = smooth_pair(f, fan, angular_res) ? SingularLabel::regular : SingularLabel::undetermined;
  } else if (pc.in_count > 0) {
    pc.label = SingularLabel::upper_singular;
  } else if (pc.out_count > 0) {
    pc.label = SingularLabel::lower_singular;
  } else {
    const double v = f(p);
    const Range r = f.range();
    const double margin = certification_tolerance(f, fan.delta);
    pc.label = v <= r.inf + margin || v >= r.sup - margin ? SingularLabel::range_boundary : SingularLabel::undetermined;
  }
  pc.fan = std::move(fan);
  return pc;
}

}  // namespace detail

/// Labels p by the f-geodesic stubs of length delta through it: upper when none leaves,
/// lower when none arrives, regular when an arriving and a leaving stub join smoothly.
/// Points with f outside the declared range are range-boundary.
inline PointClass classify_point(const ScalarField& f, Point2 p, const ClassifyOptions& o = {}) {
  FanOptions fo;
  fo.delta = o.delta;
  fo.angular_res = o.angular_res;
  fo.tol_rel = o.tol_rel;
  const double delta = fan_delta(f, fo);
  const double v = f(p);
  const Range r = f.range();
  if (v < r.inf - certification_tolerance(f, delta) || v > r.sup + certification_tolerance(f, delta)) {
    PointClass pc;
    pc.label = SingularLabel::range_boundary;
    pc.fan.point = p;
    pc.fan.delta = delta;
    return pc;
  }
  if (o.fast) {
    const double h = 1e-3 * delta;
    const Vec2 df = fd_differential(f, p, h);
    if (is_finite(df) && norm(df) > 0.5) {
      const double center = angle_of(f.metric().legendre_vector(p, df));
      const auto out = local_stub(f, p, delta, true, center, o.fast_half_width, fo);
      if (out) {
        const auto in = local_stub(f, p, delta, false, center, o.fast_half_width, fo);
        if (in && std::abs(angle_diff(angle_of(*in), angle_of(*out))) <= o.fast_half_width) {
          PointClass pc;
          pc.label = SingularLabel::regular;
          pc.fan.point = p;
          pc.fan.delta = delta;
          pc.fan.incoming_dirs = {*in};
          pc.fan.outgoing_dirs = {*out};
          pc.in_count = pc.out_count = 1;
          pc.fast_path = true;
          return pc;
        }
      }
    }
  }
  PointClass pc = detail::label_from_fan(f, p, direction_fan(f, p, fo), o.angular_res);
  const Window& w = f.window();
  if (!w.periodic && pc.label != SingularLabel::regular) {
    const double edge = std::min({p.x - w.xmin, w.xmax - p.x, p.y - w.ymin, w.ymax - p.y});
    pc.window_exit = edge < 2.0 * delta;
  }
  return pc;
}

// --------------------------------------------------------------------------
// Grid labelling and graph extraction

struct LabelGrid {
  GridField geometry;  // node layout only
  std::vector<SingularLabel> labels;
  std::vector<char> window_exit;  // excluded from masks and statistics
  std::vector<Vec2> velocity;     // outgoing F-unit velocity at regular nodes, NaN elsewhere
  int fast_decisions = 0;

  SingularLabel at(int i, int j) const { return labels[geometry.index(i, j)]; }
  bool usable(std::size_t k) const { return !window_exit[k]; }
  std::size_t count(SingularLabel l) const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) n += usable(k) && labels[k] == l;
    return n;
  }
  std::size_t excluded() const { return static_cast<std::size_t>(std::count(window_exit.begin(), window_exit.end(), 1)); }
  /// Undetermined share among usable nodes that were not range-boundary.
  double undetermined_fraction() const {
    const std::size_t total = labels.size() - excluded() - count(SingularLabel::range_boundary);
    return total == 0 ? 0.0 : static_cast<double>(count(SingularLabel::undetermined)) / static_cast<double>(total);
  }
  std::vector<Point2> nodes_with(SingularLabel l) const {
    std::vector<Point2> out;
    for (int j = 0; j < geometry.ny(); ++j)
      for (int i = 0; i < geometry.nx(); ++i)
        if (usable(geometry.index(i, j)) && at(i, j) == l) out.push_back(geometry.node(i, j));
    return out;
  }
};

/// Classifies every node of a cells-per-side grid over the field window; the probe
/// length defaults to the grid spacing.
inline LabelGrid classify_grid(const ScalarField& f, int cells, ClassifyOptions o = {}) {
  if (cells < 16) throw Error(ErrorCode::invalid_input, "grid_n must be >= 16");
  LabelGrid g{GridField(f.window(), cells), {}, {}, {}, 0};
  if (o.delta <= 0) o.delta = g.geometry.spacing();
  g.labels.resize(g.geometry.size());
  g.window_exit.assign(g.geometry.size(), 0);
  g.velocity.assign(g.geometry.size(), Vec2{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()});
  for (int j = 0; j < g.geometry.ny(); ++j)
    for (int i = 0; i < g.geometry.nx(); ++i) {
      const PointClass pc = classify_point(f, g.geometry.node(i, j), o);
      const std::size_t k = g.geometry.index(i, j);
      g.labels[k] = pc.label;
      g.window_exit[k] = pc.window_exit;
      if (pc.label == SingularLabel::regular && !pc.fan.outgoing_dirs.empty()) g.velocity[k] = pc.fan.outgoing_dirs[0];
      g.fast_decisions += pc.fast_path;
    }
  return g;
}

struct GraphVertex {
  Point2 pos;
  PointClass cls;
  int degree = 0;
  int component = -1;
};

struct GraphEdge {
  int a = -1, b = -1;
  std::vector<Point2> polyline;  // unwrapped chart coordinates from a to b
  double length = 0.0;           // metric length traversed from a to b
  double length_reverse = 0.0;   // from b to a
  SingularLabel label = SingularLabel::upper_singular;
  int component = -1;
};

struct SingularGraph {
  Window window;
  Metric metric;
  double spacing = 0.0;
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  int components = 0;
  std::vector<Point2> upper_nodes;  // raw labelled nodes before thinning
  std::vector<Point2> lower_nodes;
  double undetermined_fraction = 0.0;

  /// Points along edges (resampled at the grid spacing) and vertices carrying the label.
  std::vector<Point2> locus_points(SingularLabel l) const {
    std::vector<Point2> out;
    for (const auto& e : edges) {
      if (e.label != l) continue;
      for (std::size_t k = 0; k + 1 < e.polyline.size(); ++k) {
        const Point2 a = e.polyline[k], b = e.polyline[k + 1];
        const int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / spacing)));
        for (int s = 0; s < n; ++s) out.push_back(window.wrap(a + (static_cast<double>(s) / n) * (b - a)));
      }
      if (!e.polyline.empty()) out.push_back(window.wrap(e.polyline.back()));
    }
    for (const auto& v : vertices)
      if (v.cls.label == l) out.push_back(window.wrap(v.pos));
    return out;
  }
};

namespace detail {

struct Mask {
  int nx, ny;
  bool periodic;
  std::vector<char> on;
  bool get(int i, int j) const {
    if (periodic) {
      i = ((i % nx) + nx) % nx;
      j = ((j % ny) + ny) % ny;
    } else if (i < 0 || j < 0 || i >= nx || j >= ny) {
      return false;
    }
    return on[static_cast<std::size_t>(j) * nx + i];
  }
  std::pair<int, int> wrap(int i, int j) const {
    if (periodic) return {((i % nx) + nx) % nx, ((j % ny) + ny) % ny};
    return {i, j};
  }
  bool inside(int i, int j) const { return periodic || (i >= 0 && j >= 0 && i < nx && j < ny); }
  std::size_t id(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

// P2..P9 clockwise from north.
constexpr int kNbr[8][2] = {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};

inline void zhang_suen(Mask& m) {
  bool changed = true;
  std::vector<std::size_t> del;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      del.clear();
      for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
          if (!m.on[m.id(i, j)]) continue;
          int P[8];
          for (int k = 0; k < 8; ++k) P[k] = m.get(i + kNbr[k][0], j + kNbr[k][1]);
          const int B = std::accumulate(P, P + 8, 0);
          if (B < 2 || B > 6) continue;
          int A = 0;
          for (int k = 0; k < 8; ++k) A += P[k] == 0 && P[(k + 1) % 8] == 1;
          if (A != 1) continue;
          // P2 P4 P6 / P4 P6 P8 in the first pass, P2 P4 P8 / P2 P6 P8 in the second.
          const bool c1 = pass == 0 ? !(P[0] && P[2] && P[4]) : !(P[0] && P[2] && P[6]);
          const bool c2 = pass == 0 ? !(P[2] && P[4] && P[6]) : !(P[0] && P[4] && P[6]);
          if (c1 && c2) del.push_back(m.id(i, j));
        }
      for (std::size_t k : del) m.on[k] = 0;
      changed = changed || !del.empty();
    }
  }
}

// Fills 4-connected background pockets of at most max_cells nodes; loops that small are
// below the grid resolution and would survive thinning as spurious cycles.
inline void fill_small_holes(Mask& m, std::size_t max_cells) {
  std::vector<char> seen(m.on.size(), 0);
  constexpr int k4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      if (m.on[m.id(i, j)] || seen[m.id(i, j)]) continue;
      std::vector<std::pair<int, int>> cells{{i, j}}, stack{{i, j}};
      seen[m.id(i, j)] = 1;
      bool open = false;
      while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        for (const auto& d : k4) {
          if (!m.inside(a + d[0], b + d[1])) {
            open = true;
            continue;
          }
          auto [x, y] = m.wrap(a + d[0], b + d[1]);
          if (m.on[m.id(x, y)] || seen[m.id(x, y)]) continue;
          seen[m.id(x, y)] = 1;
          cells.push_back({x, y});
          stack.push_back({x, y});
        }
      }
      if (!open && cells.size() <= max_cells)
        for (auto [x, y] : cells) m.on[m.id(x, y)] = 1;
    }
}

// 8-connected component labels.
inline std::vector<int> components8(const Mask& m, int& count) {
  std::vector<int> comp(m.on.size(), -1);
  count = 0;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      if (!m.on[m.id(i, j)] || comp[m.id(i, j)] >= 0) continue;
      std::vector<std::pair<int, int>> stack{{i, j}};
      comp[m.id(i, j)] = count;
      while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        for (const auto& d : kNbr) {
          if (!m.inside(a + d[0], b + d[1]) || !m.get(a + d[0], b + d[1])) continue;
          auto [x, y] = m.wrap(a + d[0], b + d[1]);
          if (comp[m.id(x, y)] >= 0) continue;
          comp[m.id(x, y)] = count;
          stack.push_back({x, y});
        }
      }
      ++count;
    }
  return comp;
}

// m-adjacency: a diagonal neighbor counts only when both shared 4-neighbors are off.
inline std::vector<std::pair<int, int>> m_neighbors(const Mask& m, int i, int j) {
  std::vector<std::pair<int, int>> out;
  for (const auto& d : kNbr) {
    const int a = i + d[0], b = j + d[1];
    if (!m.inside(a, b) || !m.get(a, b)) continue;
    if (d[0] != 0 && d[1] != 0 && (m.get(i + d[0], j) || m.get(i, j + d[1]))) continue;
    out.push_back(m.wrap(a, b));
  }
  return out;
}

inline double perp_distance(Point2 p, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double l2 = dot(ab, ab);
  if (l2 == 0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

inline void douglas_peucker(const std::vector<Point2>& in, std::size_t lo, std::size_t hi, double tol,
                            std::vector<char>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1;
  std::size_t arg = lo;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const double d = perp_distance(in[k], in[lo], in[hi]);
    if (d > worst) {
      worst = d;
      arg = k;
    }
  }
  if (worst <= tol) return;
  keep[arg] = 1;
  douglas_peucker(in, lo, arg, tol, keep);
  douglas_peucker(in, arg, hi, tol, keep);
}

inline std::vector<Point2> simplify(const std::vector<Point2>& in, double tol) {
  if (in.size() <= 2) return in;
  std::vector<char> keep(in.size(), 0);
  keep.front() = keep.back() = 1;
  douglas_peucker(in, 0, in.size() - 1, tol, keep);
  std::vector<Point2> out;
  for (std::size_t k = 0; k < in.size(); ++k)
    if (keep[k]) out.push_back(in[k]);
  return out;
}

inline double polyline_length(const Metric& m, const std::vector<Point2>& poly, bool reverse) {
  double len = 0.0;
  for (std::size_t k = 1; k < poly.size(); ++k) {
    const Vec2 d = poly[k] - poly[k - 1];
    len += m.norm(0.5 * (poly[k] + poly[k - 1]), reverse ? -d : d);
  }
  return len;
}

// Appends the graph of one label's mask to g.
inline void build_graph(const ScalarField& f, const GridField& geo, Mask mask, SingularLabel label,
                        const ClassifyOptions& co, SingularGraph& g) {
  const Window& w = geo.window();
  const double h = geo.spacing();
  int ncomp = 0;
  const auto comp_before = components8(mask, ncomp);
  std::vector<std::vector<std::pair<int, int>>> members(ncomp);
  for (int j = 0; j < mask.ny; ++j)
    for (int i = 0; i < mask.nx; ++i)
      if (comp_before[mask.id(i, j)] >= 0) members[comp_before[mask.id(i, j)]].push_back({i, j});
  fill_small_holes(mask, 4);
  zhang_suen(mask);
  // Components erased by thinning keep one pixel.
  for (const auto& mem : members) {
    bool alive = false;
    for (auto [i, j] : mem) alive = alive || mask.on[mask.id(i, j)];
    if (!alive) mask.on[mask.id(mem[mem.size() / 2].first, mem[mem.size() / 2].second)] = 1;
  }
  auto pos = [&](int i, int j) { return geo.node(i, j); };
  auto add_vertex = [&](Point2 p) {
    GraphVertex v;
    v.pos = p;
    ClassifyOptions vo = co;
    v.cls = classify_point(f, w.wrap(p), vo);
    g.vertices.push_back(v);
    return static_cast<int>(g.vertices.size()) - 1;
  };

  // Small components collapse to a single vertex.
  int nthin = 0;
  const auto comp = components8(mask, nthin);
  std::vector<std::vector<std::pair<int, int>>> thin_members(nthin);
  for (int j = 0; j < mask.ny; ++j)
    for (int i = 0; i < mask.nx; ++i)
      if (comp[mask.id(i, j)] >= 0) thin_members[comp[mask.id(i, j)]].push_back({i, j});
  for (const auto& mem : thin_members) {
    const Point2 p0 = pos(mem.front().first, mem.front().second);
    Vec2 acc{0, 0};
    double ext = 0;
    for (auto [i, j] : mem) {
      const Vec2 d = w.displacement(p0, pos(i, j));
      acc = acc + d;
      ext = std::max(ext, norm(d));
    }
    if (ext > 3.0 * h) continue;
    for (auto [i, j] : mem) mask.on[mask.id(i, j)] = 0;
    add_vertex(w.wrap(p0 + acc / static_cast<double>(mem.size())));
  }

  // Vertex pixels: degree != 2; adjacent vertex pixels form one cluster.
  std::vector<int> cluster(mask.on.size(), -1);
  std::vector<int> deg(mask.on.size(), 0);
  for (int j = 0; j < mask.ny; ++j)
    for (int i = 0; i < mask.nx; ++i)
      if (mask.on[mask.id(i, j)]) deg[mask.id(i, j)] = static_cast<int>(m_neighbors(mask, i, j).size());
  for (int j = 0; j < mask.ny; ++j)
    for (int i = 0; i < mask.nx; ++i) {
      const std::size_t id = mask.id(i, j);
      if (!mask.on[id] || deg[id] == 2 || cluster[id] >= 0) continue;
      std::vector<std::pair<int, int>> stack{{i, j}}, mem;
      const int vid = static_cast<int>(g.vertices.size());
      cluster[id] = vid;
      while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        mem.push_back({a, b});
        for (auto [x, y] : m_neighbors(mask, a, b)) {
          const std::size_t k = mask.id(x, y);
          if (deg[k] == 2 || cluster[k] >= 0) continue;
          cluster[k] = vid;
          stack.push_back({x, y});
        }
      }
      const Point2 p0 = pos(mem.front().first, mem.front().second);
      Vec2 acc{0, 0};
      for (auto [a, b] : mem) acc = acc + w.displacement(p0, pos(a, b));
      add_vertex(w.wrap(p0 + acc / static_cast<double>(mem.size())));
    }

  std::vector<char> visited(mask.on.size(), 0);
  auto trace = [&](int vstart, int si, int sj, int ni, int nj) {
    // Walk from the vertex pixel (si, sj) through (ni, nj) until a vertex pixel.
    std::vector<Point2> poly{g.vertices[vstart].pos};
    Point2 cur_pos = pos(si, sj);
    // Start the unwrapped polyline at the vertex position.
    cur_pos = g.vertices[vstart].pos + w.displacement(g.vertices[vstart].pos, cur_pos);
    poly.push_back(cur_pos);
    int pi = si, pj = sj, ci = ni, cj = nj;
    while (true) {
      cur_pos = cur_pos + w.displacement(pos(pi, pj), pos(ci, cj));
      poly.push_back(cur_pos);
      const std::size_t cid = mask.id(ci, cj);
      if (cluster[cid] >= 0) {
        const int vend = cluster[cid];
        poly.push_back(cur_pos + w.displacement(pos(ci, cj), g.vertices[vend].pos));
        return std::pair{vend, poly};
      }
      visited[cid] = 1;
      int qi = -1, qj = -1;
      for (auto [x, y] : m_neighbors(mask, ci, cj))
        if (!(x == pi && y == pj) && (cluster[mask.id(x, y)] >= 0 || !visited[mask.id(x, y)] || (x == si && y == sj))) {
          qi = x;
          qj = y;
          break;
        }
      if (qi < 0) return std::pair{-1, poly};
      pi = ci;
      pj = cj;
      ci = qi;
      cj = qj;
    }
  };
  auto emit = [&](int a, int b, std::vector<Point2> poly) {
    GraphEdge e;
    e.a = a;
    e.b = b;
    e.polyline = simplify(poly, 0.75 * h);
    e.length = polyline_length(g.metric, e.polyline, false);
    e.length_reverse = polyline_length(g.metric, e.polyline, true);
    e.label = label;
    g.edges.push_back(std::move(e));
    ++g.vertices[a].degree;
    ++g.vertices[b].degree;
  };
  std::set<std::pair<std::size_t, std::size_t>> direct;
  for (int j = 0; j < mask.ny; ++j)
    for (int i = 0; i < mask.nx; ++i) {
      const std::size_t id = mask.id(i, j);
      if (!mask.on[id] || cluster[id] < 0) continue;
      for (auto [x, y] : m_neighbors(mask, i, j)) {
        const std::size_t k = mask.id(x, y);
        if (cluster[k] >= 0) {
          if (cluster[k] != cluster[id] && direct.insert({std::min(id, k), std::max(id, k)}).second) {
            const Point2 a = g.vertices[cluster[id]].pos;
            emit(cluster[id], cluster[k], {a, a + w.displacement(a, g.vertices[cluster[k]].pos)});
          }
          continue;
        }
        if (visited[k]) continue;
        auto [vend, poly] = trace(cluster[id], i, j, x, y);
        if (vend >= 0) emit(cluster[id], vend, std::move(poly));
      }
    }
  // Pure cycles: promote one pixel to a vertex and trace the loop.
  for (int j = 0; j < mask.ny; ++j)
    for (int i = 0; i < mask.nx; ++i) {
      const std::size_t id = mask.id(i, j);
      if (!mask.on[id] || visited[id] || cluster[id] >= 0) continue;
      const int v = add_vertex(pos(i, j));
      cluster[id] = v;
      const auto nb = m_neighbors(mask, i, j);
      if (nb.empty()) continue;
      auto [vend, poly] = trace(v, i, j, nb.front().first, nb.front().second);
      if (vend >= 0) emit(v, vend, std::move(poly));
    }
}

}  // namespace detail

struct ExtractOptions {
  int grid_n = 256;
  ClassifyOptions classify;  // delta <= 0 means the grid spacing
  double crossing = 0.0;     // > 0: differential jump along a grid edge that also marks a node; 0 disables
};

namespace detail {

/// A probe of length h labels only nodes within about h sin(alpha) of a ridge whose
/// f-geodesics meet at half-angle alpha. Between two regular neighbours a, b the jump of
/// the differential (df_a - df_b).e is 2 sin(alpha) cos(phi) across such a ridge and O(h)
/// in smooth parts. A large positive jump (converging) marks an upper crossing, a large
/// negative one (diverging) a lower crossing; the node nearer to where the first-order
/// expansions from a and b meet is marked. A ridge keeps its jump when the pair widens to
/// (a - e, b + e); near a cone tip the jump grows with the separation and is dropped.
inline std::pair<std::vector<char>, std::vector<char>> crossing_marks(const ScalarField& f, const LabelGrid& lg,
                                                                    double threshold) {
  const GridField& geo = lg.geometry;
  const Window& w = geo.window();
  const Metric& m = f.metric();
  std::vector<char> up(lg.labels.size(), 0), low(lg.labels.size(), 0);
  if (!(threshold > 0)) return {up, low};
  std::vector<double> fv(lg.labels.size(), 0.0);
  std::vector<Vec2> df(lg.labels.size());
  auto regular = [&](std::size_t k) { return lg.usable(k) && lg.labels[k] == SingularLabel::regular && is_finite(lg.velocity[k]); };
  auto at = [&](int i, int j) -> std::optional<std::size_t> {
    if (w.periodic) return geo.index(((i % geo.nx()) + geo.nx()) % geo.nx(), ((j % geo.ny()) + geo.ny()) % geo.ny());
    if (i < 0 || j < 0 || i >= geo.nx() || j >= geo.ny()) return std::nullopt;
    return geo.index(i, j);
  };
  for (int j = 0; j < geo.ny(); ++j)
    for (int i = 0; i < geo.nx(); ++i) {
      const std::size_t k = geo.index(i, j);
      if (!regular(k)) continue;
      fv[k] = f(geo.node(i, j));
      df[k] = m.legendre_covector(geo.node(i, j), lg.velocity[k]);
    }
  for (int j = 0; j < geo.ny(); ++j)
    for (int i = 0; i < geo.nx(); ++i) {
      const std::size_t a = geo.index(i, j);
      if (!regular(a)) continue;
      for (auto [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
        const auto b = at(i + di, j + dj);
        if (!b || !regular(*b)) continue;
        const Vec2 d = w.displacement(geo.node(i, j), geo.node(i + di, j + dj));
        const double jump = dot(df[a] - df[*b], d);
        if (std::abs(jump) <= threshold * norm(d)) continue;
        const auto a2 = at(i - di, j - dj), b2 = at(i + 2 * di, j + 2 * dj);
        if (a2 && b2 && regular(*a2) && regular(*b2) && std::abs(dot(df[*a2] - df[*b2], d)) >= 1.5 * std::abs(jump)) continue;
        const double s = (fv[*b] - fv[a] - dot(df[*b], d)) / jump;
        (jump > 0 ? up : low)[s < 0.5 ? a : *b] = 1;
      }
    }
  return {up, low};
}

}  // namespace detail

/// Classifies grid nodes, thins the upper and lower masks separately, and links the
/// skeletons into a graph with junction / endpoint vertices.
inline SingularGraph extract_singular_locus(const ScalarField& f, const ExtractOptions& o = {}) {
  const LabelGrid lg = classify_grid(f, o.grid_n, o.classify);
  return [&] {
    SingularGraph g;
    g.window = f.window();
    g.metric = f.metric();
    g.spacing = lg.geometry.spacing();
    g.undetermined_fraction = lg.undetermined_fraction();
    g.upper_nodes = lg.nodes_with(SingularLabel::upper_singular);
    g.lower_nodes = lg.nodes_with(SingularLabel::lower_singular);
    ClassifyOptions vo = o.classify;
    if (vo.delta <= 0) vo.delta = g.spacing;
    const auto crossed = detail::crossing_marks(f, lg, o.crossing);
    for (SingularLabel l : {SingularLabel::upper_singular, SingularLabel::lower_singular}) {
      const auto& extra = l == SingularLabel::upper_singular ? crossed.first : crossed.second;
      detail::Mask mask{lg.geometry.nx(), lg.geometry.ny(), g.window.periodic, std::vector<char>(lg.labels.size(), 0)};
      for (std::size_t k = 0; k < lg.labels.size(); ++k) mask.on[k] = lg.usable(k) && (lg.labels[k] == l || extra[k]);
      detail::build_graph(f, lg.geometry, std::move(mask), l, vo, g);
    }
    // Components by union-find over edges.
    std::vector<int> parent(g.vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& e : g.edges) parent[find(e.a)] = find(e.b);
    std::map<int, int> ids;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
      const int r = find(static_cast<int>(v));
      if (!ids.count(r)) ids[r] = static_cast<int>(ids.size());
      g.vertices[v].component = ids[r];
    }
    for (auto& e : g.edges) e.component = g.vertices[e.a].component;
    g.components = static_cast<int>(ids.size());
    return g;
  }();
}

// --------------------------------------------------------------------------
// Intrinsic distance and local trees

namespace detail {

// The graph as a network of short segments (length <= spacing); vertex ids come first.
struct Net {
  struct Seg {
    int u, v;
    Point2 pu, pv;  // unwrapped, pv = pu + displacement
    double len_f, len_r;
    SingularLabel label;
  };
  std::vector<Point2> pts;
  std::vector<Seg> segs;
  std::vector<std::vector<std::pair<int, double>>> adj;  // (node, cost of travelling there)
  std::vector<SingularLabel> node_label;
};

inline Net build_net(const SingularGraph& g) {
  Net n;
  const Window& w = g.window;
  for (const auto& v : g.vertices) {
    n.pts.push_back(v.pos);
    n.node_label.push_back(v.cls.label);
  }
  auto add_node = [&](Point2 p, SingularLabel l) {
    n.pts.push_back(p);
    n.node_label.push_back(l);
    return static_cast<int>(n.pts.size()) - 1;
  };
  auto add_seg = [&](int u, int v, Point2 pu, Point2 pv, SingularLabel l) {
    const Vec2 d = pv - pu;
    const Point2 mid = w.wrap(0.5 * (pu + pv));
    const double lf = norm(d) > 0 ? g.metric.norm(mid, d) : 0.0;
    const double lr = norm(d) > 0 ? g.metric.norm(mid, -d) : 0.0;
    n.segs.push_back({u, v, pu, pv, lf, lr, l});
  };
  for (const auto& e : g.edges) {
    const auto& poly = e.polyline;
    int prev = e.a;
    Point2 prev_pos = poly.front();
    for (std::size_t k = 1; k < poly.size(); ++k) {
      const Point2 a = poly[k - 1], b = poly[k];
      const int pieces = std::max(1, static_cast<int>(std::ceil(norm(b - a) / g.spacing)));
      for (int s = 1; s <= pieces; ++s) {
        const Point2 p = a + (static_cast<double>(s) / pieces) * (b - a);
        const bool last = k + 1 == poly.size() && s == pieces;
        const int node = last ? e.b : add_node(w.wrap(p), e.label);
        add_seg(prev, node, prev_pos, p, e.label);
        prev = node;
        prev_pos = p;
      }
    }
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (g.vertices[v].degree == 0) add_seg(static_cast<int>(v), static_cast<int>(v), g.vertices[v].pos, g.vertices[v].pos, g.vertices[v].cls.label);
  n.adj.assign(n.pts.size(), {});
  for (const auto& s : n.segs) {
    if (s.u == s.v) continue;
    n.adj[s.u].push_back({s.v, s.len_f});
    n.adj[s.v].push_back({s.u, s.len_r});
  }
  return n;
}

struct Snap {
  int seg = -1;
  double t = 0.0;
  double dist = kInf;
};

inline Snap snap(const Net& n, const Window& w, Point2 q) {
  Snap best;
  for (std::size_t k = 0; k < n.segs.size(); ++k) {
    const auto& s = n.segs[k];
    const Point2 qq = s.pu + w.displacement(s.pu, q);
    const Vec2 d = s.pv - s.pu;
    const double l2 = dot(d, d);
    const double t = l2 > 0 ? std::clamp(dot(qq - s.pu, d) / l2, 0.0, 1.0) : 0.0;
    const double dist = norm(qq - (s.pu + t * d));
    if (dist < best.dist) best = {static_cast<int>(k), t, dist};
  }
  return best;
}

inline std::vector<double> dijkstra(const Net& n, const std::vector<std::pair<int, double>>& sources,
                                    const std::vector<char>* allowed = nullptr) {
  std::vector<double> dist(n.pts.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto [s, c] : sources)
    if (c < dist[s]) {
      dist[s] = c;
      pq.push({c, s});
    }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto [v, c] : n.adj[u]) {
      if (allowed && !(*allowed)[v]) continue;
      if (d + c < dist[v]) {
        dist[v] = d + c;
        pq.push({dist[v], v});
      }
    }
  }
  return dist;
}

inline double net_distance(const Net& n, const Snap& a, const Snap& b, const std::vector<char>* allowed = nullptr) {
  const auto& sa = n.segs[a.seg];
  const auto& sb = n.segs[b.seg];
  double best = kInf;
  if (a.seg == b.seg) best = b.t >= a.t ? (b.t - a.t) * sa.len_f : (a.t - b.t) * sa.len_r;
  const auto dist = dijkstra(n, {{sa.u, a.t * sa.len_r}, {sa.v, (1 - a.t) * sa.len_f}}, allowed);
  best = std::min(best, dist[sb.u] + b.t * sb.len_f);
  best = std::min(best, dist[sb.v] + (1 - b.t) * sb.len_r);
  return best;
}

}  // namespace detail

/// Length of the shortest path inside the graph from q1 to q2; infinity across
/// components. Locations are snapped to the graph and must lie within snap_tol
/// (default three grid spacings).
inline double intrinsic_distance(const SingularGraph& g, Point2 q1, Point2 q2, double snap_tol = 0.0) {
  const auto net = detail::build_net(g);
  if (net.segs.empty()) throw Error(ErrorCode::invalid_input, "empty singular graph");
  const double tol = snap_tol > 0 ? snap_tol : 3.0 * g.spacing;
  const auto a = detail::snap(net, g.window, q1);
  const auto b = detail::snap(net, g.window, q2);
  if (a.dist > tol || b.dist > tol) throw Error(ErrorCode::invalid_input, "location is not on the singular graph");
  return detail::net_distance(net, a, b);
}

struct TreeReport {
  int balls_tested = 0;
  int cycles_found = 0;
  int connectivity_failures = 0;
  double max_distortion = 0.0;  // max of δ(c, q) / d(c, q) over sampled close pairs
  bool passed = false;
};

/// Samples ball centers on the graph and checks that the locus inside each ball of
/// radius r is cycle-free, and that locus points within r/2 of the center are joined
/// to it inside the ball (ambient closeness implies intrinsic closeness).
inline TreeReport verify_local_tree(const SingularGraph& g, double r, int ball_samples, std::uint64_t seed) {
  if (!(r > 4.0 * g.spacing)) throw Error(ErrorCode::invalid_input, "ball radius must exceed 4 grid spacings");
  const auto net = detail::build_net(g);
  TreeReport rep;
  std::vector<int> real;
  for (std::size_t k = 0; k < net.segs.size(); ++k)
    if (net.segs[k].u != net.segs[k].v) real.push_back(static_cast<int>(k));
  if (real.empty()) {
    rep.passed = true;
    return rep;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, real.size() - 1);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  const Window& w = g.window;
  for (int b = 0; b < ball_samples; ++b) {
    const auto& s = net.segs[real[pick(rng)]];
    const double t = ut(rng);
    const Point2 c = w.wrap(s.pu + t * (s.pv - s.pu));
    auto amb = [&](Point2 q) { return norm(w.displacement(c, q)); };
    std::vector<char> in(net.pts.size(), 0);
    for (std::size_t v = 0; v < net.pts.size(); ++v) in[v] = amb(net.pts[v]) <= r;
    // Cycle rank E - V + C of the induced subgraph, counted on the center's label.
    int E = 0, V = 0;
    std::vector<int> parent(net.pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& sg : net.segs) {
      if (sg.u == sg.v || sg.label != s.label || !in[sg.u] || !in[sg.v]) continue;
      ++E;
      parent[find(sg.u)] = find(sg.v);
    }
    std::set<int> roots;
    for (std::size_t v = 0; v < net.pts.size(); ++v) {
      if (!in[v] || net.node_label[v] != s.label) continue;
      bool touched = false;
      for (const auto& nb : net.adj[v]) touched = touched || in[nb.first];
      if (!touched) continue;
      ++V;
      roots.insert(find(static_cast<int>(v)));
    }
    const int rank = E - V + static_cast<int>(roots.size());
    ++rep.balls_tested;
    if (rank > 0) ++rep.cycles_found;
    // Connectivity inside the ball and δ vs ambient distortion.
    const auto dist = detail::dijkstra(net, {{s.u, t * s.len_r}, {s.v, (1 - t) * s.len_f}}, &in);
    bool connected = true;
    for (std::size_t v = 0; v < net.pts.size(); ++v) {
      if (net.node_label[v] != s.label) continue;
      const double d = amb(net.pts[v]);
      if (d > 0.5 * r) continue;
      if (!std::isfinite(dist[v])) {
        connected = false;
        continue;
      }
      if (d >= 2.0 * g.spacing) rep.max_distortion = std::max(rep.max_distortion, dist[v] / g.metric.norm(c, w.displacement(c, net.pts[v])));
    }
    if (!connected) ++rep.connectivity_failures;
  }
  rep.passed = rep.cycles_found == 0 && rep.connectivity_failures == 0;
  return rep;
}

// --------------------------------------------------------------------------
// Local comparisons

/// Symmetric Hausdorff distance between point sets (window displacement); inf if one is empty.
inline double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b, const Window& w) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  auto directed = [&](const std::vector<Point2>& x, const std::vector<Point2>& y) {
    double worst = 0.0;
    for (Point2 p : x) {
      double best = kInf;
      for (Point2 q : y) best = std::min(best, norm(w.displacement(p, q)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

struct EquivalenceOptions {
  int cells = 96;       // local grid resolution across the box of half-width 1.25 delta
  double kink = 0.3;    // slope drop marking a ridge of the sublevel distance
  ClassifyOptions classify;
};

struct EquivalenceReport {
  bool applicable = false;
  bool dual = false;  // lower-singular p: superlevel set and reversed metric
  double level = 0.0;  // a0 (or b0 in the dual case)
  double ball_radius = 0.0;
  double spacing = 0.0;
  std::size_t cut_points = 0;
  std::size_t singular_points = 0;
  std::vector<Point2> cut, singular;  // samples inside the ball
  double hausdorff_gap = kInf;
  bool passed = false;
  std::string note;
};

/// Compares, inside the ball of radius delta/4 around a singular p, the cut locus of the
/// distance from the sublevel set M^{a0} (a0 = f(p) - delta/2) with the upper locus of f;
/// for lower-singular p, the distance to the superlevel set f >= f(p) + delta/2 under the
/// reversed metric against the lower locus.
inline EquivalenceReport check_local_cutlocus_equivalence(const ScalarField& f, Point2 p, double delta,
                                                          const EquivalenceOptions& o = {}) {
  EquivalenceReport rep;
  if (!(delta > 0)) throw Error(ErrorCode::invalid_input, "delta must be positive");
  const PointClass pc = classify_point(f, p, ClassifyOptions{o.classify.delta, o.classify.angular_res, o.classify.tol_rel, false});
  if (pc.label != SingularLabel::upper_singular && pc.label != SingularLabel::lower_singular) {
    rep.note = std::string("no-op: p is ") + to_string(pc.label);
    rep.passed = true;
    return rep;
  }
  rep.dual = pc.label == SingularLabel::lower_singular;
  const double fp = f(p);
  rep.level = rep.dual ? fp + 0.5 * delta : fp - 0.5 * delta;
  const double slack = 2.0 * f.accuracy() + 1e-12;
  const bool inside = fp - 0.5 * delta > f.range().inf + slack && fp + 0.5 * delta < f.range().sup - slack;
  if (!inside) {
    rep.note = "no-op: [f(p) - delta/2, f(p) + delta/2] is not inside the open range of f";
    rep.passed = true;
    return rep;
  }
  rep.applicable = true;
  const Metric& m = f.metric();
  const double half = 1.25 * delta;
  const Window box{p.x - half, p.x + half, p.y - half, p.y + half, false};
  GridField seed(box, o.cells);
  const double h = seed.spacing();
  rep.spacing = h;
  rep.ball_radius = 0.25 * delta;
  std::vector<double> fv(seed.size());
  for (int j = 0; j < seed.ny(); ++j)
    for (int i = 0; i < seed.nx(); ++i) {
      const double v = f(f.window().wrap(seed.node(i, j)));
      fv[seed.index(i, j)] = v;
      const double gap = rep.dual ? rep.level - v : v - rep.level;
      if (gap <= 2.0 * h) seed.at(i, j) = std::max(0.0, gap);
    }
  const GridField D = march_distance(rep.dual ? m.reverse() : m, seed);

  constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  std::vector<Point2> cut, sing;
  ClassifyOptions co = o.classify;
  co.delta = h;
  const SingularLabel want = rep.dual ? SingularLabel::lower_singular : SingularLabel::upper_singular;
  const double reach = rep.ball_radius + 2.0 * h;
  // Slope drop at a node or between two neighbours. A ridge keeps its drop when the
  // stencil doubles; a smooth concave part (a cone tip nearby) doubles it.
  auto ridge_at = [&](int i, int j) {
    for (const auto& d : kDirs) {
      const double s = h * std::hypot(d[0], d[1]);
      auto val = [&](int k) { return D.at(i + k * d[0], j + k * d[1]); };
      auto drop = [&](int step) {
        auto slope = [&](int k) { return (val(step * (k + 1)) - val(step * k)) / (step * s); };
        return std::max({slope(-1) - slope(0), slope(-1) - slope(1), slope(-2) - slope(0)});
      };
      const double k1 = drop(1);
      if (k1 > o.kink && drop(2) < 1.5 * k1) return true;
    }
    return false;
  };
  for (int j = 4; j + 4 < D.ny(); ++j)
    for (int i = 4; i + 4 < D.nx(); ++i) {
      const Point2 x = D.node(i, j);
      if (norm(x - p) > reach) continue;
      if (ridge_at(i, j)) cut.push_back(x);
    }
  // Probe-length-h labels hold only within about tol_rel * h of the locus, so the singular
  // side is sampled on the half-cell lattice to keep it as dense as the ridge band.
  const Point2 o0 = D.node(0, 0);
  const int halves = static_cast<int>(std::ceil(2.0 * reach / h));
  const Point2 snap0{o0.x + h * std::round((p.x - o0.x) / h), o0.y + h * std::round((p.y - o0.y) / h)};
  for (int b = -halves; b <= halves; ++b)
    for (int a = -halves; a <= halves; ++a) {
      const Point2 x = snap0 + Vec2{0.5 * h * a, 0.5 * h * b};
      if (norm(x - p) > reach) continue;
      if (classify_point(f, f.window().wrap(x), co).label == want) sing.push_back(x);
    }
  auto inner = [&](const std::vector<Point2>& pts) {
    std::vector<Point2> out;
    for (Point2 q : pts)
      if (norm(q - p) <= rep.ball_radius) out.push_back(q);
    return out;
  };
  const auto cut_in = inner(cut), sing_in = inner(sing);
  rep.cut_points = cut_in.size();
  rep.singular_points = sing_in.size();
  rep.cut = cut_in;
  rep.singular = sing_in;
  auto directed = [&](const std::vector<Point2>& a, const std::vector<Point2>& b) {
    double worst = 0.0;
    for (Point2 q : a) {
      double best = kInf;
      for (Point2 r : b) best = std::min(best, norm(q - r));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (cut_in.empty() && sing_in.empty()) {
    rep.hausdorff_gap = 0.0;
  } else {
    rep.hausdorff_gap = std::max(directed(cut_in, sing), directed(sing_in, cut));
  }
  rep.passed = rep.hausdorff_gap <= 2.0 * h * (1.0 + 1e-9);
  return rep;
}

struct ReconstructionReport {
  bool applicable = false;
  double max_error = kInf;  // max over nodes of |f - (d_N + c)|
  double tolerance = 0.0;
  double spacing = 0.0;
  bool passed = false;
  std::string note;
};

/// Rebuilds d_N from the level set N = f^{-1}(c) by grid marching over `region`
/// (default: the field window) and compares f with d_N + c.
inline ReconstructionReport check_dist_reconstruction(const ScalarField& f, double c, std::optional<Window> region = {},
                                                      int cells = 256) {
  ReconstructionReport rep;
  const Window w = region.value_or(f.window());
  GridField seed(w, cells);
  const double h = seed.spacing();
  rep.spacing = h;
  rep.tolerance = 2.0 * h;
  if (!std::isfinite(f.range().inf)) {
    rep.note = "not-applicable: no minimum level (range unbounded below)";
    return rep;
  }
  std::vector<double> fv(seed.size());
  double fmin = kInf;
  for (int j = 0; j < seed.ny(); ++j)
    for (int i = 0; i < seed.nx(); ++i) {
      fv[seed.index(i, j)] = f(seed.node(i, j));
      fmin = std::min(fmin, fv[seed.index(i, j)]);
    }
  if (std::abs(fmin - c) > rep.tolerance) {
    rep.note = "not-applicable: the minimum level differs from c";
    return rep;
  }
  rep.applicable = true;
  for (std::size_t k = 0; k < fv.size(); ++k)
    if (fv[k] - c <= 2.0 * h) seed.values()[k] = std::max(0.0, fv[k] - c);
  const GridField D = march_distance(f.metric(), seed);
  rep.max_error = 0.0;
  for (std::size_t k = 0; k < fv.size(); ++k) rep.max_error = std::max(rep.max_error, std::abs(fv[k] - (D.values()[k] + c)));
  rep.passed = rep.max_error <= rep.tolerance;
  return rep;
}

enum class ApproachSense { outgoing, incoming };

/// f-geodesic stubs at points p + eps_k dir, eps_k = eps0 2^{-k}; outgoing stubs leave
/// the sample points, incoming stubs arrive at them. Directions follow the previous
/// element so the sequence has a limit direction.
inline std::vector<FGeodesicCertificate> approach_sequence(const ScalarField& f, Point2 p, Vec2 dir, ApproachSense sense,
                                                           int count, double eps0, const FanOptions& fo = {}) {
  std::vector<FGeodesicCertificate> out;
  const bool outgoing = sense == ApproachSense::outgoing;
  const double delta = fan_delta(f, fo);
  std::optional<Vec2> prev;
  const Vec2 u = dir / norm(dir);
  for (int k = 0; k < count; ++k) {
    const Point2 x = f.window().wrap(p + std::ldexp(eps0, -k) * u);
    std::optional<Vec2> v;
    if (prev) v = local_stub(f, x, delta, outgoing, angle_of(*prev), 0.1, fo);
    if (!v) {
      const auto fan = direction_fan(f, x, fo);
      const auto& dirs = outgoing ? fan.outgoing_dirs : fan.incoming_dirs;
      double best = kInf;
      for (Vec2 d : dirs) {
        const double score = prev ? std::abs(angle_diff(angle_of(d), angle_of(*prev))) : 0.0;
        if (score < best) {
          best = score;
          v = d;
        }
      }
    }
    if (!v) continue;
    prev = v;
    out.push_back(certify_f_geodesic(f, stub_segment(f.metric(), x, *v, delta, outgoing, fo.certify_samples, fo.step)));
  }
  return out;
}

struct LimitInequalityReport {
  double margin = kInf;  // worst side difference of the limit inequality over the fan at p
  double quotient = 0.0;
  double quotient_target = 0.0;  // g_w(w, v)
  double quotient_error = kInf;
  int fan_dirs = 0;
  bool passed = false;
};

/// Finite surrogate of the first-variation limit inequalities: with w the velocity of the
/// last stub at its base point x and v the unit direction from p to x,
///   outgoing: g_w(w, v) >= g_c(c, v) for every f-geodesic c leaving p;
///   incoming: g_w(w, v) <= g_c(c, v) for every f-geodesic c arriving at p;
/// and (f(x) - f(p)) / d(p, x) is compared with g_w(w, v).
inline LimitInequalityReport check_limit_inequalities(const ScalarField& f, Point2 p,
                                                      const std::vector<FGeodesicCertificate>& seq, ApproachSense sense,
                                                      const FanOptions& fo = {}) {
  if (seq.empty()) throw Error(ErrorCode::invalid_input, "empty sequence");
  for (const auto& c : seq)
    if (!c.certified) throw Error(ErrorCode::invalid_input, "sequence elements must be certified f-geodesics");
  const Metric& m = f.metric();
  const bool outgoing = sense == ApproachSense::outgoing;
  const auto& last = seq.back().segment.samples;
  const GeodesicSample& base = outgoing ? last.front() : last.back();
  const Vec2 disp = f.window().displacement(p, base.pos);
  if (norm(disp) == 0) throw Error(ErrorCode::invalid_input, "last element must differ from p");
  const Vec2 v = m.normalize(p, disp);
  auto G = [&](Vec2 w) { return dot(m.legendre_covector(p, m.normalize(p, w)), v); };
  LimitInequalityReport rep;
  rep.quotient_target = G(base.vel);
  const DirectionFan fan = direction_fan(f, p, fo);
  const auto& dirs = outgoing ? fan.outgoing_dirs : fan.incoming_dirs;
  rep.fan_dirs = static_cast<int>(dirs.size());
  for (Vec2 c : dirs) rep.margin = std::min(rep.margin, outgoing ? rep.quotient_target - G(c) : G(c) - rep.quotient_target);
  const double d = m.has_analytic_distance() ? m.analytic_distance(p, base.pos) : m.norm(p, disp);
  rep.quotient = (f(base.pos) - f(p)) / d;
  rep.quotient_error = std::abs(rep.quotient - rep.quotient_target);
  rep.passed = rep.margin >= -1e-3 && rep.quotient_error <= 1e-2;
  return rep;
}

}  // namespace singloc

#endif  // SINGLOC_SINGULAR_HPP_
