// SPDX-License-Identifier: Apache-2.0
//
// Node-sampled scalar grids over a window and a Finslerian distance solver on
// them. The solver is a Dijkstra-ordered marching pass followed by
// Gauss-Seidel sweeps, both using the semi-Lagrangian (Hopf-Lax) update over
// the eight triangles around a node, so asymmetric norms are handled
// directionally.

#ifndef SINGLOC_GRID_FIELD_HPP_
#define SINGLOC_GRID_FIELD_HPP_

#include <functional>
#include <queue>
#include <vector>

#include "singloc/core.hpp"
#include "singloc/metric.hpp"

namespace singloc {

class GridField {
 public:
  GridField() = default;

  /// `cells` cells per side; a periodic window has `cells` nodes per side, otherwise cells + 1.
  GridField(const Window& w, int cells) : window_(w), cells_(cells) {
    if (cells < 2) throw Error(ErrorCode::invalid_input, "grid needs at least 2 cells per side");
    nx_ = ny_ = w.periodic ? cells : cells + 1;
    hx_ = w.width() / cells;
    hy_ = w.height() / cells;
    values_.assign(static_cast<std::size_t>(nx_) * ny_, kInf);
  }

  const Window& window() const { return window_; }
  int cells() const { return cells_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double spacing() const { return std::max(hx_, hy_); }
  std::size_t size() const { return values_.size(); }

  Point2 node(int i, int j) const { return {window_.xmin + i * hx_, window_.ymin + j * hy_}; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Index-space neighbor with wrap-around on periodic windows; false when outside.
  bool neighbor(int i, int j, int di, int dj, int& oi, int& oj) const {
    oi = i + di;
    oj = j + dj;
    if (window_.periodic) {
      oi = (oi % nx_ + nx_) % nx_;
      oj = (oj % ny_ + ny_) % ny_;
      return true;
    }
    return oi >= 0 && oi < nx_ && oj >= 0 && oj < ny_;
  }

  /// Bilinear interpolation; points outside a bounded window are clamped.
  double operator()(Point2 p) const {
    p = window_.wrap(p);
    double fx = (p.x - window_.xmin) / hx_;
    double fy = (p.y - window_.ymin) / hy_;
    if (!window_.periodic) {
      fx = std::clamp(fx, 0.0, static_cast<double>(nx_ - 1));
      fy = std::clamp(fy, 0.0, static_cast<double>(ny_ - 1));
    }
    int i = std::min(static_cast<int>(std::floor(fx)), window_.periodic ? nx_ - 1 : nx_ - 2);
    int j = std::min(static_cast<int>(std::floor(fy)), window_.periodic ? ny_ - 1 : ny_ - 2);
    const double tx = fx - i, ty = fy - j;
    int i1, j1, tmp;
    neighbor(i, j, 1, 0, i1, tmp);
    neighbor(i, j, 0, 1, tmp, j1);
    return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i1, j) + (1 - tx) * ty * at(i, j1) + tx * ty * at(i1, j1);
  }

 private:
  Window window_;
  int cells_ = 0;
  int nx_ = 0, ny_ = 0;
  double hx_ = 0, hy_ = 0;
  std::vector<double> values_;
};

inline GridField sample_grid(const Window& w, int cells, const std::function<double(Point2)>& fn) {
  GridField g(w, cells);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) g.at(i, j) = fn(g.node(i, j));
  return g;
}

namespace detail {

inline constexpr int kRing[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

// min over lambda in [0,1] of lambda*ua + (1-lambda)*ub + F(x, lambda*da + (1-lambda)*db)
// where da, db are displacements from the two triangle vertices to x.
inline double hopf_lax(const Metric& m, Point2 x, double ua, Vec2 da, double ub, Vec2 db) {
  auto cost = [&](double l) { return l * ua + (1 - l) * ub + m.norm(x, l * da + (1 - l) * db); };
  if (!std::isfinite(ua)) return std::isfinite(ub) ? ub + m.norm(x, db) : kInf;
  if (!std::isfinite(ub)) return ua + m.norm(x, da);
  constexpr double g = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = cost(c), fd = cost(d);
  for (int it = 0; it < 24; ++it) {
    if (fc < fd) { hi = d; d = c; fd = fc; c = hi - g * (hi - lo); fc = cost(c); }
    else { lo = c; c = d; fc = fd; d = lo + g * (hi - lo); fd = cost(d); }
  }
  return std::min({fc, fd, cost(0.0), cost(1.0)});
}

inline double local_update(const Metric& m, const GridField& g, int i, int j, int only_dir = -1) {
  const Point2 x = g.node(i, j);
  double best = kInf;
  double u[8];
  Vec2 disp[8];
  bool ok[8];
  for (int k = 0; k < 8; ++k) {
    int oi, oj;
    ok[k] = g.neighbor(i, j, kRing[k][0], kRing[k][1], oi, oj);
    u[k] = ok[k] ? g.at(oi, oj) : kInf;
    disp[k] = Vec2{-kRing[k][0] * g.hx(), -kRing[k][1] * g.hy()};
  }
  for (int k = 0; k < 8; ++k) {
    const int k2 = (k + 1) % 8;
    if (only_dir >= 0 && k != only_dir && k2 != only_dir) continue;
    if (!std::isfinite(u[k]) && !std::isfinite(u[k2])) continue;
    best = std::min(best, hopf_lax(m, x, u[k], disp[k], u[k2], disp[k2]));
  }
  return best;
}

}  // namespace detail

/// Distance from the seeded nodes: `seed` holds known values (finite) and kInf
/// elsewhere. Travel is from the seeds toward each node, so pass m.reverse()
/// for distances to a set.
inline GridField march_distance(const Metric& m, GridField seed, int sweeps = 2) {
  GridField& g = seed;
  const int nx = g.nx(), ny = g.ny();
  std::vector<char> fixed(g.size(), 0), accepted(g.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (std::isfinite(g.at(i, j))) {
        fixed[g.index(i, j)] = 1;
        heap.push({g.at(i, j), g.index(i, j)});
      }
  if (heap.empty()) throw Error(ErrorCode::invalid_input, "march_distance needs at least one seed");
  while (!heap.empty()) {
    const auto [val, idx] = heap.top();
    heap.pop();
    if (accepted[idx]) continue;
    accepted[idx] = 1;
    const int i = static_cast<int>(idx % nx), j = static_cast<int>(idx / nx);
    for (int k = 0; k < 8; ++k) {
      int oi, oj;
      if (!g.neighbor(i, j, detail::kRing[k][0], detail::kRing[k][1], oi, oj)) continue;
      const std::size_t o = g.index(oi, oj);
      if (accepted[o] || fixed[o]) continue;
      // Direction from the neighbor back to the accepted node.
      int back = (k + 4) % 8;
      const double cand = detail::local_update(m, g, oi, oj, back);
      if (cand < g.at(oi, oj)) {
        g.at(oi, oj) = cand;
        heap.push({cand, o});
      }
    }
  }
  for (int s = 0; s < sweeps; ++s) {
    const bool fwd = (s % 2) == 0;
    for (int jj = 0; jj < ny; ++jj) {
      const int j = fwd ? jj : ny - 1 - jj;
      for (int ii = 0; ii < nx; ++ii) {
        const int i = fwd ? ii : nx - 1 - ii;
        if (fixed[g.index(i, j)]) continue;
        g.at(i, j) = std::min(g.at(i, j), detail::local_update(m, g, i, j));
      }
    }
  }
  return g;
}

}  // namespace singloc

#endif  // SINGLOC_GRID_FIELD_HPP_
