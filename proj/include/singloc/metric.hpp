// SPDX-License-Identifier: Apache-2.0
//
// Finsler structures on a planar chart: Euclidean, Riemannian (user tensor
// field), Zermelo navigation with a constant wind (a Randers metric), the
// flat torus, and the reversal F(x, -v) of any of these.

#ifndef SINGLOC_METRIC_HPP_
#define SINGLOC_METRIC_HPP_

#include <functional>
#include <memory>
#include <random>
#include <string>

#include "singloc/core.hpp"

namespace singloc {

using TensorFn = std::function<Mat2(Point2)>;

class Metric {
 public:
  enum class Kind { euclidean, riemannian, randers_zermelo, flat_torus, reversed };

  Metric() : Metric(euclidean()) {}

  static Metric euclidean() {
    auto d = std::make_shared<Data>();
    d->kind = Kind::euclidean;
    return Metric(std::move(d));
  }

  /// `tensor` must return a symmetric positive definite matrix at every chart point.
  static Metric riemannian(TensorFn tensor, std::string label = "riemannian") {
    if (!tensor) throw Error(ErrorCode::invalid_input, "riemannian metric needs a tensor callback");
    auto d = std::make_shared<Data>();
    d->kind = Kind::riemannian;
    d->tensor = std::move(tensor);
    d->label = std::move(label);
    return Metric(std::move(d));
  }

  /// Unit-speed travel under the drift `wind`; requires |wind| < 1.
  static Metric randers_zermelo(Vec2 wind) {
    if (!is_finite(wind)) throw Error(ErrorCode::invalid_input, "non-finite wind");
    if (singloc::norm(wind) >= 1.0) throw Error(ErrorCode::invalid_metric, "Zermelo wind must satisfy |W| < 1");
    auto d = std::make_shared<Data>();
    d->kind = Kind::randers_zermelo;
    d->wind = wind;
    return Metric(std::move(d));
  }

  static Metric flat_torus(double lx, double ly) {
    if (!(lx > 0) || !(ly > 0)) throw Error(ErrorCode::invalid_input, "torus periods must be positive");
    auto d = std::make_shared<Data>();
    d->kind = Kind::flat_torus;
    d->lx = lx;
    d->ly = ly;
    return Metric(std::move(d));
  }

  /// F̄(x, v) = F(x, -v). Reversal is an involution that returns the original object.
  Metric reverse() const {
    if (d_->kind == Kind::reversed) return Metric(d_->inner);
    auto d = std::make_shared<Data>();
    d->kind = Kind::reversed;
    d->inner = d_;
    return Metric(std::move(d));
  }

  Kind kind() const { return d_->kind; }
  /// Kind after peeling one reversal.
  Kind base_kind() const { return d_->kind == Kind::reversed ? d_->inner->kind : d_->kind; }
  bool is_reversed() const { return d_->kind == Kind::reversed; }
  Metric inner() const {
    if (d_->kind != Kind::reversed) throw Error(ErrorCode::invalid_input, "metric is not reversed");
    return Metric(d_->inner);
  }
  Vec2 wind() const { return d_->kind == Kind::reversed ? Metric(d_->inner).wind() : d_->wind; }
  std::array<double, 2> periods() const {
    const Data& b = d_->kind == Kind::reversed ? *d_->inner : *d_;
    return {b.lx, b.ly};
  }
  bool periodic() const { return base_kind() == Kind::flat_torus; }
  /// Same underlying structure (reversal of a shared base compares equal to itself).
  bool same_as(const Metric& o) const { return d_ == o.d_; }

  std::string name() const {
    switch (d_->kind) {
      case Kind::euclidean: return "euclidean";
      case Kind::riemannian: return d_->label;
      case Kind::randers_zermelo: return "randers_zermelo";
      case Kind::flat_torus: return "flat_torus";
      case Kind::reversed: return "reversed(" + Metric(d_->inner).name() + ")";
    }
    return "unknown";
  }

  /// Geodesics are affine lines in the chart (all constant-coefficient kinds).
  bool straight_geodesics() const { return base_kind() != Kind::riemannian; }
  /// A closed-form distance is available.
  bool has_analytic_distance() const { return base_kind() != Kind::riemannian; }

  double norm(Point2 x, Vec2 v) const {
    if (!is_finite(x) || !is_finite(v)) throw Error(ErrorCode::invalid_input, "non-finite tangent vector");
    if (v.x == 0.0 && v.y == 0.0) return 0.0;
    return norm_unchecked(x, v);
  }

  Mat2 fundamental_tensor(Point2 x, Vec2 v) const {
    if (!is_finite(x) || !is_finite(v)) throw Error(ErrorCode::invalid_input, "non-finite tangent vector");
    if (v.x == 0.0 && v.y == 0.0) throw Error(ErrorCode::domain_error, "fundamental tensor undefined on the zero section");
    switch (d_->kind) {
      case Kind::euclidean:
      case Kind::flat_torus: return Mat2::identity();
      case Kind::riemannian: return symmetrize(d_->tensor(x));
      case Kind::randers_zermelo: return randers_tensor(v);
      case Kind::reversed: return Metric(d_->inner).fundamental_tensor(x, -v);
    }
    return Mat2::identity();
  }

  /// g_v(v, ·) as a covector.
  Vec2 legendre_covector(Point2 x, Vec2 v) const { return fundamental_tensor(x, v) * v; }

  /// Second derivative of a geodesic with velocity v at x (chart coordinates).
  Vec2 spray(Point2 x, Vec2 v) const {
    if (v.x == 0.0 && v.y == 0.0) throw Error(ErrorCode::domain_error, "spray undefined on the zero section");
    switch (d_->kind) {
      case Kind::euclidean:
      case Kind::flat_torus:
      case Kind::randers_zermelo: return {0.0, 0.0};
      case Kind::riemannian: return riemannian_spray(x, v);
      case Kind::reversed: return Metric(d_->inner).spray(x, -v);
    }
    return {0.0, 0.0};
  }

  /// F*(xi) = max { xi(v) : F(x, v) = 1 }.
  double dual_norm(Point2 x, Vec2 xi) const {
    switch (d_->kind) {
      case Kind::euclidean:
      case Kind::flat_torus: return singloc::norm(xi);
      case Kind::riemannian: return std::sqrt(std::max(0.0, symmetrize(d_->tensor(x)).inverse().bilinear(xi, xi)));
      case Kind::randers_zermelo: return singloc::norm(xi) + dot(xi, d_->wind);
      case Kind::reversed: return Metric(d_->inner).dual_norm(x, -xi);
    }
    return 0.0;
  }

  /// The vector w with F(w) = F*(xi) and g_w(w, ·) = xi, i.e. the Finslerian gradient
  /// of a function whose differential is xi.
  Vec2 legendre_vector(Point2 x, Vec2 xi) const {
    if (xi.x == 0.0 && xi.y == 0.0) return {0.0, 0.0};
    switch (d_->kind) {
      case Kind::euclidean:
      case Kind::flat_torus: return xi;
      case Kind::riemannian: return symmetrize(d_->tensor(x)).inverse() * xi;
      case Kind::randers_zermelo: {
        const double n = singloc::norm(xi);
        return dual_norm(x, xi) * (xi / n + d_->wind);
      }
      case Kind::reversed: return -Metric(d_->inner).legendre_vector(x, -xi);
    }
    return xi;
  }

  /// Closed-form distance d(p, q); throws when has_analytic_distance() is false.
  double analytic_distance(Point2 p, Point2 q) const {
    switch (d_->kind) {
      case Kind::euclidean: return singloc::norm(q - p);
      case Kind::flat_torus: {
        const Vec2 t = torus_displacement(p, q);
        return singloc::norm(t);
      }
      case Kind::randers_zermelo: return randers_norm(q - p);
      case Kind::reversed: return Metric(d_->inner).analytic_distance(q, p);
      case Kind::riemannian: break;
    }
    throw Error(ErrorCode::invalid_input, "no analytic distance for " + name());
  }

  /// Shortest lattice displacement from p to q on the torus (identity elsewhere).
  Vec2 torus_displacement(Point2 p, Point2 q) const {
    Vec2 d = q - p;
    if (!periodic()) return d;
    const auto [lx, ly] = periods();
    d.x = std::remainder(d.x, lx);
    d.y = std::remainder(d.y, ly);
    return d;
  }

  /// F(a) - F(a - d) for position-independent norms, without cancellation when a is
  /// long and d is short (used by limit constructions).
  double norm_decrement(Vec2 a, Vec2 d) const {
    const Vec2 b = a - d;
    const Vec2 sum = 2.0 * a - d;
    switch (d_->kind) {
      case Kind::euclidean:
      case Kind::flat_torus: {
        const double na = singloc::norm(a), nb = singloc::norm(b);
        return na + nb > 0 ? dot(d, sum) / (na + nb) : 0.0;
      }
      case Kind::randers_zermelo: {
        const Vec2 w = d_->wind;
        const double lam = 1.0 - dot(w, w);
        auto root = [&](Vec2 v) { return std::sqrt(dot(w, v) * dot(w, v) + lam * dot(v, v)); };
        const double ra = root(a), rb = root(b);
        const double dq = dot(w, d) * dot(w, sum) + lam * dot(d, sum);
        return ((ra + rb > 0 ? dq / (ra + rb) : 0.0) - dot(w, d)) / lam;
      }
      case Kind::reversed: return Metric(d_->inner).norm_decrement(-a, -d);
      case Kind::riemannian: break;
    }
    throw Error(ErrorCode::invalid_input, "norm decrement needs a position-independent norm");
  }

  /// Scales v so that F(x, v) = 1.
  Vec2 normalize(Point2 x, Vec2 v) const {
    const double f = norm(x, v);
    if (!(f > 0)) throw Error(ErrorCode::invalid_input, "cannot normalize the zero vector");
    return v / f;
  }

 private:
  struct Data {
    Kind kind = Kind::euclidean;
    Vec2 wind{};
    double lx = 1.0, ly = 1.0;
    TensorFn tensor;
    std::string label;
    std::shared_ptr<const Data> inner;
  };

  explicit Metric(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static Mat2 symmetrize(const Mat2& m) {
    const double off = 0.5 * (m.b + m.c);
    return {m.a, off, off, m.d};
  }

  double norm_unchecked(Point2 x, Vec2 v) const {
    switch (d_->kind) {
      case Kind::euclidean:
      case Kind::flat_torus: return singloc::norm(v);
      case Kind::riemannian: return std::sqrt(std::max(0.0, symmetrize(d_->tensor(x)).bilinear(v, v)));
      case Kind::randers_zermelo: return randers_norm(v);
      case Kind::reversed: return Metric(d_->inner).norm_unchecked(x, -v);
    }
    return 0.0;
  }

  // Travel time T with |v - T W| = T.
  double randers_norm(Vec2 v) const {
    const Vec2 w = d_->wind;
    const double lam = 1.0 - dot(w, w);
    const double wv = dot(w, v);
    return (std::sqrt(wv * wv + lam * dot(v, v)) - wv) / lam;
  }

  // F = alpha + beta with alpha = sqrt(v^T A v), A = (lam I + W W^T) / lam^2, beta = -W.v / lam.
  Mat2 randers_tensor(Vec2 v) const {
    const Vec2 w = d_->wind;
    const double lam = 1.0 - dot(w, w);
    const Mat2 A = (1.0 / (lam * lam)) * (lam * Mat2::identity() + Mat2::outer(w, w));
    const Vec2 Av = A * v;
    const double alpha = std::sqrt(dot(v, Av));
    const Vec2 b = -1.0 / lam * w;
    const double F = alpha + dot(b, v);
    const Vec2 grad = Av / alpha + b;
    const Mat2 hess_alpha = (1.0 / alpha) * (A - (1.0 / (alpha * alpha)) * Mat2::outer(Av, Av));
    return Mat2::outer(grad, grad) + F * hess_alpha;
  }

  // -Gamma^k_ij v^i v^j with metric derivatives from central differences of the callback.
  Vec2 riemannian_spray(Point2 x, Vec2 v) const {
    const double h = 1e-6 * std::max(1.0, std::max(std::abs(x.x), std::abs(x.y)));
    const Mat2 dx = (1.0 / (2 * h)) * (symmetrize(d_->tensor({x.x + h, x.y})) - symmetrize(d_->tensor({x.x - h, x.y})));
    const Mat2 dy = (1.0 / (2 * h)) * (symmetrize(d_->tensor({x.x, x.y + h})) - symmetrize(d_->tensor({x.x, x.y - h})));
    const Mat2 inv = symmetrize(d_->tensor(x)).inverse();
    // Lowered Christoffel contraction: l_i = (d_v a)_{i j} v^j - 1/2 (d_i a)(v, v)
    const Mat2 dv = v.x * dx + v.y * dy;
    const Vec2 first = dv * v;
    const Vec2 second{0.5 * dx.bilinear(v, v), 0.5 * dy.bilinear(v, v)};
    return -1.0 * (inv * (first - second));
  }

  std::shared_ptr<const Data> d_;
};

struct MetricValidationReport {
  int samples = 0;
  double max_homogeneity_residual = 0.0;
  double min_eigenvalue = kInf;
  double max_reversal_residual = 0.0;
  bool passed = false;
};

/// Samples the norm axioms on [-2, 2]^2: positive homogeneity, positive definite
/// fundamental tensor, and that reversal is an involution.
inline MetricValidationReport validate_metric(const Metric& m, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw Error(ErrorCode::invalid_input, "sample_count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), ang(0.0, 2 * kPi), scale(0.1, 10.0);
  MetricValidationReport rep;
  rep.samples = sample_count;
  const Metric twice = m.reverse().reverse();
  for (int i = 0; i < sample_count; ++i) {
    const Point2 x{pos(rng), pos(rng)};
    const Vec2 v = scale(rng) * unit_angle(ang(rng));
    const double lam = scale(rng);
    const double f = m.norm(x, v);
    rep.max_homogeneity_residual = std::max(rep.max_homogeneity_residual, std::abs(m.norm(x, lam * v) - lam * f) / (lam * f));
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, m.fundamental_tensor(x, v).sym_eigenvalues()[0]);
    rep.max_reversal_residual = std::max(rep.max_reversal_residual, std::abs(twice.norm(x, v) - f));
  }
  rep.passed = rep.max_homogeneity_residual < 1e-9 && rep.min_eigenvalue > 0 && rep.max_reversal_residual == 0.0;
  return rep;
}

}  // namespace singloc

#endif  // SINGLOC_METRIC_HPP_
