// SPDX-License-Identifier: Apache-2.0
//
// Closed planar sets built from disks, half-planes and points with
// complement / union / intersection / difference, plus an exact Euclidean
// distance evaluator based on the arrangement of primitive boundaries.

#ifndef SINGLOC_CLOSED_SET_HPP_
#define SINGLOC_CLOSED_SET_HPP_

#include <memory>
#include <variant>
#include <vector>

#include "singloc/core.hpp"

namespace singloc {

struct DiskPrim {
  Point2 center;
  double radius = 1.0;
};
/// {x : normal · x <= offset}, normal of unit length.
struct HalfPlanePrim {
  Vec2 normal{1.0, 0.0};
  double offset = 0.0;
};
struct PointPrim {
  Point2 p;
};

using Primitive = std::variant<DiskPrim, HalfPlanePrim, PointPrim>;

/// Signed Euclidean distance to a primitive (negative inside).
inline double signed_distance(const Primitive& prim, Point2 x) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiskPrim>) return norm(x - p.center) - p.radius;
        else if constexpr (std::is_same_v<T, HalfPlanePrim>) return dot(p.normal, x) - p.offset;
        else return norm(x - p.p);
      },
      prim);
}

/// Immutable CSG tree. All sets are closed: the complement of A is the closure of
/// its set complement and difference(A, B) = A minus the interior of B.
class ClosedSet {
 public:
  enum class Op { primitive, complement, unite, intersect, subtract };

  static ClosedSet disk(Point2 c, double r) {
    if (!(r > 0) || !is_finite(c)) throw Error(ErrorCode::invalid_input, "disk needs a finite center and r > 0");
    return leaf(DiskPrim{c, r});
  }
  static ClosedSet half_plane(Vec2 normal, double offset) {
    const double n = norm(normal);
    if (!(n > 0)) throw Error(ErrorCode::invalid_input, "half-plane normal must be nonzero");
    return leaf(HalfPlanePrim{normal / n, offset / n});
  }
  static ClosedSet point(Point2 p) {
    if (!is_finite(p)) throw Error(ErrorCode::invalid_input, "non-finite point");
    return leaf(PointPrim{p});
  }
  static ClosedSet complement(const ClosedSet& a) { return node(Op::complement, {a}); }
  static ClosedSet unite(const ClosedSet& a, const ClosedSet& b) { return node(Op::unite, {a, b}); }
  static ClosedSet unite(const std::vector<ClosedSet>& parts) {
    if (parts.empty()) throw Error(ErrorCode::invalid_input, "empty union");
    return parts.size() == 1 ? parts.front() : node(Op::unite, parts);
  }
  static ClosedSet intersect(const ClosedSet& a, const ClosedSet& b) { return node(Op::intersect, {a, b}); }
  static ClosedSet subtract(const ClosedSet& a, const ClosedSet& b) { return node(Op::subtract, {a, b}); }

  Op op() const { return n_->op; }
  const Primitive& primitive() const { return n_->prim; }
  const std::vector<ClosedSet>& children() const { return n_->kids; }

  /// Closed membership with slack eps.
  bool contains(Point2 x, double eps = 1e-12) const { return eval(*n_, x, false, nullptr, eps); }

  /// Visits primitives in a fixed depth-first order.
  template <class Fn>
  void for_each_primitive(Fn&& fn) const { walk(*n_, fn); }

  /// Membership where the primitive at address `on_boundary` is treated as
  /// containing x both as itself and as its complement.
  bool contains_on_boundary(Point2 x, const Primitive* on_boundary, double eps = 1e-12) const {
    return eval(*n_, x, false, on_boundary, eps);
  }

 private:
  struct Node {
    Op op = Op::primitive;
    Primitive prim;
    std::vector<ClosedSet> kids;
  };

  static ClosedSet leaf(Primitive p) {
    auto n = std::make_shared<Node>();
    n->prim = p;
    return ClosedSet(std::move(n));
  }
  static ClosedSet node(Op op, std::vector<ClosedSet> kids) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    return ClosedSet(std::move(n));
  }
  explicit ClosedSet(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  template <class Fn>
  static void walk(const Node& n, Fn& fn) {
    if (n.op == Op::primitive) {
      fn(n.prim);
      return;
    }
    for (const auto& k : n.kids) walk(*k.n_, fn);
  }

  static bool eval(const Node& n, Point2 x, bool negated, const Primitive* on_boundary, double eps) {
    switch (n.op) {
      case Op::primitive: {
        if (&n.prim == on_boundary) return true;
        if (const auto* pt = std::get_if<PointPrim>(&n.prim)) return negated ? true : norm(x - pt->p) <= eps;
        const double s = signed_distance(n.prim, x);
        return negated ? s >= -eps : s <= eps;
      }
      case Op::complement: return eval(*n.kids[0].n_, x, !negated, on_boundary, eps);
      case Op::unite:
      case Op::intersect: {
        const bool any = (n.op == Op::unite) != negated;
        for (const auto& k : n.kids) {
          const bool v = eval(*k.n_, x, negated, on_boundary, eps);
          if (any && v) return true;
          if (!any && !v) return false;
        }
        return !any;
      }
      case Op::subtract: {
        // A ∩ cl(B^c); negated: cl(A^c) ∪ B.
        const bool a = eval(*n.kids[0].n_, x, negated, on_boundary, eps);
        const bool b = eval(*n.kids[1].n_, x, !negated, on_boundary, eps);
        return negated ? (a || b) : (a && b);
      }
    }
    return false;
  }

  std::shared_ptr<const Node> n_;
};

/// Exact Euclidean distance to a ClosedSet. The boundary of the set lies on the
/// union of primitive boundaries; those are cut at their mutual intersections and
/// the pieces lying in the set are kept.
class SetDistance {
 public:
  struct Arc {
    Point2 center;
    double radius;
    double a0, a1;  // a0 < a1, a1 - a0 <= 2 pi
  };
  struct LinePiece {
    Point2 origin;
    Vec2 dir;
    double t0, t1;  // may be infinite
  };

  explicit SetDistance(ClosedSet set) : set_(std::move(set)) {
    std::vector<const Primitive*> prims;
    set_.for_each_primitive([&](const Primitive& p) { prims.push_back(&p); });
    for (const Primitive* p : prims) {
      if (const auto* d = std::get_if<DiskPrim>(p)) build_circle(*p, *d, prims);
      else if (const auto* h = std::get_if<HalfPlanePrim>(p)) build_line(*p, *h, prims);
      else {
        const auto& pt = std::get<PointPrim>(*p);
        if (set_.contains_on_boundary(pt.p, p) && !interior(pt.p)) points_.push_back(pt.p);
      }
    }
  }

  const ClosedSet& set() const { return set_; }
  bool empty() const { return arcs_.empty() && lines_.empty() && points_.empty() && !set_.contains({0, 0}); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<LinePiece>& lines() const { return lines_; }
  const std::vector<Point2>& points() const { return points_; }

  double operator()(Point2 x) const { return distance(x); }

  double distance(Point2 x) const {
    if (set_.contains(x, 0.0)) return 0.0;
    double best = kInf;
    for (const auto& a : arcs_) best = std::min(best, arc_distance(a, x));
    for (const auto& l : lines_) {
      double t = dot(x - l.origin, l.dir);
      t = std::clamp(t, l.t0, l.t1);
      best = std::min(best, norm(x - (l.origin + t * l.dir)));
    }
    for (const auto& p : points_) best = std::min(best, norm(x - p));
    return best;
  }

  /// Nearest point of the set's boundary pieces (x itself when inside).
  Point2 nearest(Point2 x) const {
    if (set_.contains(x, 0.0)) return x;
    double best = kInf;
    Point2 arg = x;
    auto offer = [&](Point2 y) {
      const double d = norm(x - y);
      if (d < best) { best = d; arg = y; }
    };
    for (const auto& a : arcs_) {
      const Vec2 r = x - a.center;
      const double phi = angle_of(r);
      if (in_arc(a, phi) && norm(r) > 0) offer(a.center + a.radius / norm(r) * r);
      offer(a.center + a.radius * unit_angle(a.a0));
      offer(a.center + a.radius * unit_angle(a.a1));
    }
    for (const auto& l : lines_) offer(l.origin + std::clamp(dot(x - l.origin, l.dir), l.t0, l.t1) * l.dir);
    for (const auto& p : points_) offer(p);
    return arg;
  }

 private:
  // A point primitive swallowed by a region does not contribute to the boundary.
  bool interior(Point2 p) const {
    for (int k = 0; k < 16; ++k)
      if (!set_.contains(p + 1e-7 * unit_angle(2 * kPi * k / 16), 0.0)) return false;
    return true;
  }

  static bool in_arc(const Arc& a, double phi) {
    double rel = std::fmod(phi - a.a0, 2 * kPi);
    if (rel < 0) rel += 2 * kPi;
    return rel <= a.a1 - a.a0;
  }

  static double arc_distance(const Arc& a, Point2 x) {
    const Vec2 r = x - a.center;
    const double dr = norm(r);
    if (dr == 0.0) return a.radius;
    if (in_arc(a, angle_of(r))) return std::abs(dr - a.radius);
    return std::min(norm(x - (a.center + a.radius * unit_angle(a.a0))), norm(x - (a.center + a.radius * unit_angle(a.a1))));
  }

  static std::vector<Point2> circle_circle(const DiskPrim& c1, const DiskPrim& c2) {
    const Vec2 dv = c2.center - c1.center;
    const double d = norm(dv);
    if (d == 0.0 || d > c1.radius + c2.radius || d < std::abs(c1.radius - c2.radius)) return {};
    const double a = (d * d + (c1.radius - c2.radius) * (c1.radius + c2.radius)) / (2 * d);
    const double h = std::sqrt(std::max(0.0, (c1.radius - a) * (c1.radius + a)));
    const Vec2 u = dv / d;
    const Vec2 perp{-u.y, u.x};
    const Point2 m = c1.center + a * u;
    if (h == 0.0) return {m};
    return {m + h * perp, m - h * perp};
  }

  static std::vector<Point2> line_circle(const HalfPlanePrim& l, const DiskPrim& c) {
    const double s = dot(l.normal, c.center) - l.offset;
    if (std::abs(s) > c.radius) return {};
    const Point2 foot = c.center - s * l.normal;
    const double h = std::sqrt(std::max(0.0, (c.radius - s) * (c.radius + s)));
    const Vec2 dir{-l.normal.y, l.normal.x};
    if (h == 0.0) return {foot};
    return {foot + h * dir, foot - h * dir};
  }

  static std::vector<Point2> line_line(const HalfPlanePrim& a, const HalfPlanePrim& b) {
    const double det = cross(a.normal, b.normal);
    if (std::abs(det) < 1e-15) return {};
    return {{(a.offset * b.normal.y - b.offset * a.normal.y) / det, (a.normal.x * b.offset - b.normal.x * a.offset) / det}};
  }

  std::vector<Point2> cuts(const Primitive& self, const std::vector<const Primitive*>& prims) const {
    std::vector<Point2> pts;
    for (const Primitive* o : prims) {
      if (o == &self) continue;
      std::vector<Point2> got;
      if (const auto* d1 = std::get_if<DiskPrim>(&self)) {
        if (const auto* d2 = std::get_if<DiskPrim>(o)) got = circle_circle(*d1, *d2);
        else if (const auto* l2 = std::get_if<HalfPlanePrim>(o)) got = line_circle(*l2, *d1);
      } else if (const auto* l1 = std::get_if<HalfPlanePrim>(&self)) {
        if (const auto* d2 = std::get_if<DiskPrim>(o)) got = line_circle(*l1, *d2);
        else if (const auto* l2 = std::get_if<HalfPlanePrim>(o)) got = line_line(*l1, *l2);
      }
      pts.insert(pts.end(), got.begin(), got.end());
    }
    return pts;
  }

  void build_circle(const Primitive& self, const DiskPrim& c, const std::vector<const Primitive*>& prims) {
    std::vector<double> ang;
    for (Point2 p : cuts(self, prims)) ang.push_back(angle_of(p - c.center));
    std::sort(ang.begin(), ang.end());
    ang.erase(std::unique(ang.begin(), ang.end()), ang.end());
    if (ang.empty()) {
      if (set_.contains_on_boundary(c.center + c.radius * Vec2{1, 0}, &self)) arcs_.push_back({c.center, c.radius, 0.0, 2 * kPi});
      return;
    }
    for (std::size_t i = 0; i < ang.size(); ++i) {
      const double a0 = ang[i];
      const double a1 = (i + 1 < ang.size()) ? ang[i + 1] : ang[0] + 2 * kPi;
      if (a1 - a0 <= 0) continue;
      const Point2 mid = c.center + c.radius * unit_angle(0.5 * (a0 + a1));
      if (set_.contains_on_boundary(mid, &self)) arcs_.push_back({c.center, c.radius, a0, a1});
    }
  }

  void build_line(const Primitive& self, const HalfPlanePrim& h, const std::vector<const Primitive*>& prims) {
    const Point2 origin = h.offset * h.normal;
    const Vec2 dir{-h.normal.y, h.normal.x};
    std::vector<double> ts;
    for (Point2 p : cuts(self, prims)) ts.push_back(dot(p - origin, dir));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> bounds{-kInf};
    bounds.insert(bounds.end(), ts.begin(), ts.end());
    bounds.push_back(kInf);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
      const double t0 = bounds[i], t1 = bounds[i + 1];
      double mid;
      if (std::isinf(t0) && std::isinf(t1)) mid = 0.0;
      else if (std::isinf(t0)) mid = t1 - 1.0;
      else if (std::isinf(t1)) mid = t0 + 1.0;
      else mid = 0.5 * (t0 + t1);
      if (set_.contains_on_boundary(origin + mid * dir, &self)) lines_.push_back({origin, dir, t0, t1});
    }
  }

  ClosedSet set_;
  std::vector<Arc> arcs_;
  std::vector<LinePiece> lines_;
  std::vector<Point2> points_;
};

}  // namespace singloc

#endif  // SINGLOC_CLOSED_SET_HPP_
