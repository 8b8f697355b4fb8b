// SPDX-License-Identifier: Apache-2.0
//
// 1-Lipschitz scalar fields: distance from / to closed sets, Busemann
// functions, horofunctions, Wu's eta, limits of set sequences, max / min
// combinations, and a sampling check of the Lipschitz characterization.

#ifndef SINGLOC_FIELD_HPP_
#define SINGLOC_FIELD_HPP_

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "singloc/closed_set.hpp"
#include "singloc/core.hpp"
#include "singloc/geodesic.hpp"
#include "singloc/grid_field.hpp"
#include "singloc/metric.hpp"

namespace singloc {

enum class FieldKind {
  dist_from_set,
  neg_dist_to_set,
  busemann,
  horofunction,
  wu_eta,
  set_sequence_limit,
  max,
  min,
  shifted,
  glued,
  grid,
  custom,
};

inline const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::dist_from_set: return "dist_from_set";
    case FieldKind::neg_dist_to_set: return "neg_dist_to_set";
    case FieldKind::busemann: return "busemann";
    case FieldKind::horofunction: return "horofunction";
    case FieldKind::wu_eta: return "wu_eta";
    case FieldKind::set_sequence_limit: return "set_sequence_limit";
    case FieldKind::max: return "max";
    case FieldKind::min: return "min";
    case FieldKind::shifted: return "shifted";
    case FieldKind::glued: return "glued";
    case FieldKind::grid: return "grid";
    case FieldKind::custom: return "custom";
  }
  return "unknown";
}

/// Diagnostics of limit-based constructions.
struct LimitInfo {
  std::vector<double> schedule;
  double cauchy_gap = 0.0;  // sup over window samples of |last - previous approximant|
  bool converged = true;    // cauchy_gap below the convergence threshold
};

/// An evaluable field on a metric and window. Construction finishes all cached
/// state; evaluation afterwards is const and safe to share.
class ScalarField {
 public:
  using Fn = std::function<double(Point2)>;

  struct Spec {
    FieldKind kind = FieldKind::custom;
    Metric metric;
    Window window;
    Range range;
    double accuracy = 0.0;  // absolute accuracy class of evaluations
    std::string description;
    LimitInfo limit;
  };

  ScalarField() = default;
  ScalarField(Spec spec, Fn fn) : d_(std::make_shared<Data>(Data{std::move(spec), std::move(fn)})) {}

  double operator()(Point2 x) const { return d_->fn(x); }
  FieldKind kind() const { return d_->spec.kind; }
  const Metric& metric() const { return d_->spec.metric; }
  const Window& window() const { return d_->spec.window; }
  Range range() const { return d_->spec.range; }
  double accuracy() const { return d_->spec.accuracy; }
  const std::string& description() const { return d_->spec.description; }
  const LimitInfo& limit_info() const { return d_->spec.limit; }
  const Spec& spec() const { return d_->spec; }
  bool valid() const { return d_ != nullptr; }

 private:
  struct Data {
    Spec spec;
    Fn fn;
  };
  std::shared_ptr<const Data> d_;
};

struct FieldOptions {
  int grid_cells = 512;  // marching resolution when no closed form is available
};

namespace detail {

inline bool collect_points(const ClosedSet& s, std::vector<Point2>& out) {
  if (s.op() == ClosedSet::Op::primitive) {
    if (const auto* p = std::get_if<PointPrim>(&s.primitive())) {
      out.push_back(p->p);
      return true;
    }
    return false;
  }
  if (s.op() != ClosedSet::Op::unite) return false;
  for (const auto& k : s.children())
    if (!collect_points(k, out)) return false;
  return true;
}

inline bool symmetric_flat(const Metric& m) {
  return m.base_kind() == Metric::Kind::euclidean || m.base_kind() == Metric::Kind::flat_torus;
}

// Sup of the field over a window grid, used for declared ranges of compact windows.
inline double sample_sup(const Window& w, const std::function<double(Point2)>& fn, int n = 64) {
  double s = -kInf;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) s = std::max(s, fn({w.xmin + w.width() * i / n, w.ymin + w.height() * j / n}));
  return s;
}

// d(N, x) (travel from N to x) for metric m.
inline std::pair<std::function<double(Point2)>, double> set_distance_fn(const Metric& m, const ClosedSet& N,
                                                                       const Window& w, const FieldOptions& opt) {
  auto sd = std::make_shared<SetDistance>(N);
  if (sd->empty()) throw Error(ErrorCode::invalid_input, "closed set is empty");
  std::vector<Point2> pts;
  if (collect_points(N, pts) && m.has_analytic_distance()) {
    return {[m, pts](Point2 x) {
              double best = kInf;
              for (Point2 p : pts) best = std::min(best, m.analytic_distance(p, x));
              return best;
            },
            0.0};
  }
  if (symmetric_flat(m)) {
    if (!m.periodic()) return {[sd](Point2 x) { return sd->distance(x); }, 0.0};
    const auto [lx, ly] = m.periods();
    return {[sd, w, lx, ly](Point2 x) {
              const Point2 y = w.wrap(x);
              double best = kInf;
              for (int i = -1; i <= 1; ++i)
                for (int j = -1; j <= 1; ++j) best = std::min(best, sd->distance(y + Vec2{i * lx, j * ly}));
              return best;
            },
            0.0};
  }
  // General metric: march from the nodes lying in N.
  GridField seed(w, opt.grid_cells);
  bool any = false;
  for (int j = 0; j < seed.ny(); ++j)
    for (int i = 0; i < seed.nx(); ++i)
      if (N.contains(seed.node(i, j), 0.0)) {
        seed.at(i, j) = 0.0;
        any = true;
      }
  if (!any) throw Error(ErrorCode::invalid_input, "closed set contains no grid node; refine the grid");
  auto grid = std::make_shared<GridField>(march_distance(m, std::move(seed)));
  const double acc = 2.0 * grid->spacing();
  return {[grid, N](Point2 x) { return N.contains(x, 0.0) ? 0.0 : (*grid)(x); }, acc};
}

}  // namespace detail

/// d_N(x) = inf over p in N of d(p, x).
inline ScalarField dist_from_set(const Metric& m, const ClosedSet& N, const Window& w, const FieldOptions& opt = {}) {
  auto [fn, acc] = detail::set_distance_fn(m, N, w, opt);
  ScalarField::Spec s;
  s.kind = FieldKind::dist_from_set;
  s.metric = m;
  s.window = w;
  s.accuracy = acc;
  s.range = {0.0, m.periodic() ? detail::sample_sup(w, fn) : kInf};
  s.description = "distance from a closed set";
  return ScalarField(std::move(s), std::move(fn));
}

/// -d^N(x) = -inf over p in N of d(x, p); computed as a distance from N for the reversed metric.
inline ScalarField neg_dist_to_set(const Metric& m, const ClosedSet& N, const Window& w, const FieldOptions& opt = {}) {
  auto [fn, acc] = detail::set_distance_fn(m.reverse(), N, w, opt);
  ScalarField::Spec s;
  s.kind = FieldKind::neg_dist_to_set;
  s.metric = m;
  s.window = w;
  s.accuracy = acc;
  auto neg = [fn = std::move(fn)](Point2 x) { return -fn(x); };
  s.range = {m.periodic() ? -detail::sample_sup(w, [&](Point2 x) { return -neg(x); }) : -kInf, 0.0};
  s.description = "negative distance to a closed set";
  return ScalarField(std::move(s), std::move(neg));
}

/// Doubling schedule 2^k for k in [first, last].
inline std::vector<double> doubling_schedule(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::ldexp(1.0, k));
  return out;
}

namespace detail {

inline void require_increasing(const std::vector<double>& s, const char* what) {
  if (s.size() < 2) throw Error(ErrorCode::invalid_input, std::string(what) + " needs at least two entries");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw Error(ErrorCode::invalid_input, std::string(what) + " must be strictly increasing");
}

inline std::vector<Point2> window_samples(const Window& w, int n = 16) {
  std::vector<Point2> out;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) out.push_back({w.xmin + w.width() * i / n, w.ymin + w.height() * j / n});
  return out;
}

}  // namespace detail

struct LimitOptions {
  double convergence_tol = 1e-6;
  double monotone_tol = 1e-8;
};

/// B(x) = lim t - d(x, γ(t)) along the ray γ(t) = exp(origin, t u), u the F-normalization
/// of `ray_dir`. The returned field is the final approximant; its Cauchy gap is recorded.
inline ScalarField busemann(const Metric& m, Vec2 ray_dir, Point2 ray_origin, const Window& w,
                            std::vector<double> schedule = doubling_schedule(1, 40), const LimitOptions& lo = {}) {
  if (!m.has_analytic_distance() || m.periodic())
    throw Error(ErrorCode::invalid_input, "busemann requires a non-periodic metric with closed-form distance");
  detail::require_increasing(schedule, "busemann schedule");
  const Vec2 u = m.normalize(ray_origin, ray_dir);
  // t - d(x, γ(t)) = F(t u) - F(t u - (x - origin)) with F(t u) = t.
  auto approx = [m, u, ray_origin](Point2 x, double t) { return m.norm_decrement(t * u, x - ray_origin); };
  LimitInfo info;
  info.schedule = schedule;
  for (Point2 x : detail::window_samples(w)) {
    for (std::size_t k = 1; k < schedule.size(); ++k)
      if (approx(x, schedule[k]) < approx(x, schedule[k - 1]) - lo.monotone_tol)
        throw Error(ErrorCode::numeric_failure, "busemann approximants are not monotone");
    info.cauchy_gap = std::max(info.cauchy_gap, std::abs(approx(x, schedule.back()) - approx(x, schedule[schedule.size() - 2])));
  }
  info.converged = info.cauchy_gap < lo.convergence_tol;
  ScalarField::Spec s;
  s.kind = FieldKind::busemann;
  s.metric = m;
  s.window = w;
  s.accuracy = 0.0;
  s.description = "busemann function of a ray";
  s.limit = info;
  const double T = schedule.back();
  return ScalarField(std::move(s), [approx, T](Point2 x) { return approx(x, T); });
}

using SequenceFn = std::function<Point2(long)>;

/// Index schedule {2^k, 2^k + 1} up to n_max; both parities appear so alternating
/// sequences are sampled on every branch.
inline std::vector<long> horofunction_indices(long n_max) {
  std::vector<long> out;
  for (long n = 2; n <= n_max; n *= 2) {
    out.push_back(n);
    if (n + 1 <= n_max) out.push_back(n + 1);
  }
  return out;
}

/// f(x) = limsup of d(x_1, x_n) - d(x, x_n), realized as the max over the final
/// quarter of the index schedule.
inline ScalarField horofunction(const Metric& m, SequenceFn seq, long n_max, const Window& w) {
  if (!m.has_analytic_distance() || m.periodic())
    throw Error(ErrorCode::invalid_input, "horofunction requires a non-periodic metric with closed-form distance");
  const auto idx = horofunction_indices(n_max);
  if (idx.size() < 4) throw Error(ErrorCode::invalid_input, "n_max too small for a horofunction schedule");
  const Point2 x1 = seq(1);
  const double reach = m.analytic_distance(x1, seq(idx.back()));
  if (!(reach > 100.0 * w.diagonal())) throw Error(ErrorCode::invalid_input, "sequence does not diverge within the schedule");
  const std::size_t tail = std::max<std::size_t>(2, idx.size() / 4);
  std::vector<Point2> terms;
  for (std::size_t k = idx.size() - tail; k < idx.size(); ++k) terms.push_back(seq(idx[k]));
  ScalarField::Spec s;
  s.kind = FieldKind::horofunction;
  s.metric = m;
  s.window = w;
  s.description = "horofunction of a divergent sequence";
  for (long n : idx) s.limit.schedule.push_back(static_cast<double>(n));
  s.limit.converged = false;  // limsup surrogate, not a certified limit
  return ScalarField(std::move(s), [m, terms, x1](Point2 x) {
    double best = -kInf;
    for (const Point2& xn : terms) best = std::max(best, m.norm_decrement(xn - x1, x - x1));
    return best;
  });
}

struct WuEtaOptions {
  int sphere_vertices = 4096;
};

/// eta(x) = limsup over levels t of t - d(x, S_p(t)), S_p(t) the forward sphere of radius t
/// sampled as a polygon of exp_p(t u). Evaluated as the max over the final quarter of levels.
inline ScalarField wu_eta(const Metric& m, Point2 p, std::vector<double> levels, const Window& w,
                          const WuEtaOptions& opt = {}) {
  detail::require_increasing(levels, "wu_eta levels");
  if (!m.has_analytic_distance()) throw Error(ErrorCode::invalid_input, "wu_eta requires a closed-form distance");
  const std::size_t tail = std::max<std::size_t>(1, levels.size() / 4);
  struct Sphere {
    double t;
    std::vector<Point2> poly;
  };
  std::vector<Sphere> spheres;
  for (std::size_t k = levels.size() - tail; k < levels.size(); ++k) {
    Sphere s{levels[k], {}};
    for (int i = 0; i < opt.sphere_vertices; ++i) {
      const Vec2 u = m.normalize(p, unit_angle(2 * kPi * i / opt.sphere_vertices));
      const Point2 q = geodesic_point(m, p, u, s.t);
      if (!is_finite(q)) throw Error(ErrorCode::numeric_failure, "sphere sampling failed");
      s.poly.push_back(q);
    }
    spheres.push_back(std::move(s));
  }
  auto dist_to_polygon = [m](Point2 x, const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    std::size_t arg = 0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = m.analytic_distance(x, poly[i]);
      if (d < best) { best = d; arg = i; }
    }
    // Refine along the two edges adjacent to the nearest vertex (convex in the edge parameter).
    for (std::size_t e : {(arg + n - 1) % n, arg}) {
      const Point2 a = poly[e], b = poly[(e + 1) % n];
      double lo = 0, hi = 1;
      for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (m.analytic_distance(x, a + m1 * (b - a)) < m.analytic_distance(x, a + m2 * (b - a))) hi = m2;
        else lo = m1;
      }
      best = std::min(best, m.analytic_distance(x, a + 0.5 * (lo + hi) * (b - a)));
    }
    return best;
  };
  ScalarField::Spec s;
  s.kind = FieldKind::wu_eta;
  s.metric = m;
  s.window = w;
  s.range = {0.0, kInf};
  // Chord sagitta of the sampled sphere bounds the polygon error.
  const double chord = 2 * kPi * levels.back() / opt.sphere_vertices;
  s.accuracy = chord * chord / (8.0 * levels.back()) * 4.0;
  s.description = "Wu's eta from forward spheres";
  s.limit.schedule = levels;
  s.limit.converged = false;
  return ScalarField(std::move(s), [spheres, dist_to_polygon](Point2 x) {
    double best = -kInf;
    for (const auto& sp : spheres) best = std::max(best, sp.t - dist_to_polygon(x, sp.poly));
    return best;
  });
}

using SetSequenceFn = std::function<ClosedSet(double)>;

/// eta(x) = lim_n (n - d(x, C_n)) for a sequence of closed sets, evaluated at the
/// final level with exact Euclidean set distances. Requires a Euclidean metric.
inline ScalarField set_sequence_limit(const Metric& m, const SetSequenceFn& sets, std::vector<double> levels,
                                      const Window& w, Range range = {0.0, kInf}, const LimitOptions& lo = {}) {
  if (m.base_kind() != Metric::Kind::euclidean) throw Error(ErrorCode::invalid_input, "set_sequence_limit requires a Euclidean metric");
  detail::require_increasing(levels, "set sequence levels");
  auto last = std::make_shared<SetDistance>(sets(levels.back()));
  auto prev = std::make_shared<SetDistance>(sets(levels[levels.size() - 2]));
  const double n1 = levels.back(), n0 = levels[levels.size() - 2];
  LimitInfo info;
  info.schedule = levels;
  for (Point2 x : detail::window_samples(w))
    info.cauchy_gap = std::max(info.cauchy_gap, std::abs((n1 - last->distance(x)) - (n0 - prev->distance(x))));
  info.converged = info.cauchy_gap < lo.convergence_tol;
  ScalarField::Spec s;
  s.kind = FieldKind::set_sequence_limit;
  s.metric = m;
  s.window = w;
  s.range = range;
  s.description = "limit of n - d(x, C_n)";
  s.limit = info;
  return ScalarField(std::move(s), [last, n1](Point2 x) { return n1 - last->distance(x); });
}

enum class CombineOp { max, min };

inline ScalarField combine(CombineOp op, const ScalarField& f1, const ScalarField& f2) {
  if (f1.metric().name() != f2.metric().name()) throw Error(ErrorCode::invalid_input, "combine needs fields on the same metric");
  ScalarField::Spec s;
  s.kind = op == CombineOp::max ? FieldKind::max : FieldKind::min;
  s.metric = f1.metric();
  s.window = f1.window();
  s.accuracy = std::max(f1.accuracy(), f2.accuracy());
  const Range r1 = f1.range(), r2 = f2.range();
  s.range = op == CombineOp::max ? Range{std::max(r1.inf, r2.inf), std::max(r1.sup, r2.sup)}
                                 : Range{std::min(r1.inf, r2.inf), std::min(r1.sup, r2.sup)};
  s.description = std::string(op == CombineOp::max ? "max" : "min") + "(" + f1.description() + ", " + f2.description() + ")";
  if (op == CombineOp::max) return ScalarField(std::move(s), [f1, f2](Point2 x) { return std::max(f1(x), f2(x)); });
  return ScalarField(std::move(s), [f1, f2](Point2 x) { return std::min(f1(x), f2(x)); });
}

inline ScalarField shifted(const ScalarField& f, double c) {
  ScalarField::Spec s = f.spec();
  s.kind = FieldKind::shifted;
  s.range = {f.range().inf + c, f.range().sup + c};
  s.description = f.description() + " + const";
  return ScalarField(std::move(s), [f, c](Point2 x) { return f(x) + c; });
}

/// `upper` on {normal · x >= offset}, `lower` elsewhere. The caller guarantees that the
/// two agree on the dividing line.
inline ScalarField glued(const ScalarField& upper, const ScalarField& lower, Vec2 normal, double offset, Range range) {
  ScalarField::Spec s = upper.spec();
  s.kind = FieldKind::glued;
  s.range = range;
  s.accuracy = std::max(upper.accuracy(), lower.accuracy());
  s.description = "glued(" + upper.description() + " | " + lower.description() + ")";
  return ScalarField(std::move(s), [upper, lower, normal, offset](Point2 x) {
    return dot(normal, x) >= offset ? upper(x) : lower(x);
  });
}

inline ScalarField from_grid(const Metric& m, std::shared_ptr<const GridField> g, Range range, std::string description) {
  ScalarField::Spec s;
  s.kind = FieldKind::grid;
  s.metric = m;
  s.window = g->window();
  s.range = range;
  s.accuracy = 2.0 * g->spacing();
  s.description = std::move(description);
  return ScalarField(std::move(s), [g](Point2 x) { return (*g)(x); });
}

inline ScalarField custom_field(const Metric& m, const Window& w, Range range, ScalarField::Fn fn,
                                std::string description, double accuracy = 0.0) {
  ScalarField::Spec s;
  s.kind = FieldKind::custom;
  s.metric = m;
  s.window = w;
  s.range = range;
  s.accuracy = accuracy;
  s.description = std::move(description);
  return ScalarField(std::move(s), std::move(fn));
}

/// d(p, q) with the closed form when available, otherwise by shooting.
inline double metric_distance(const Metric& m, Point2 p, Point2 q) {
  if (m.has_analytic_distance()) return m.analytic_distance(p, q);
  DistanceOptions o;
  o.want_minimizers = false;
  return distance(m, p, q, o).value;
}

/// Central-difference differential of f at x.
inline Vec2 fd_differential(const ScalarField& f, Point2 x, double h) {
  return {(f(x + Vec2{h, 0}) - f(x - Vec2{h, 0})) / (2 * h), (f(x + Vec2{0, h}) - f(x - Vec2{0, h})) / (2 * h)};
}

struct LipschitzReport {
  double max_violation = -kInf;  // max of f(y) - f(x) - d(x, y)
  std::pair<Point2, Point2> worst_pair;
  double gradient_norm_max = 0.0;  // max of F*(df) at differentiable samples
  int gradient_samples_used = 0;
  bool passed = false;
};

struct LipschitzOptions {
  double violation_tol = 1e-6;
  double gradient_tol = 1e-3;
};

/// Samples the inequality f(y) - f(x) <= d(x, y) and the dual-norm bound F*(df) <= 1.
/// Half of the pairs are short (1% of the window diagonal) since violations show up
/// at small separation.
inline LipschitzReport check_lipschitz(const ScalarField& f, int pair_samples, int grad_samples, std::uint64_t seed,
                                       const LipschitzOptions& opt = {}) {
  if (pair_samples < 1 || grad_samples < 1) throw Error(ErrorCode::invalid_input, "sample counts must be >= 1");
  const Window& w = f.window();
  const Metric& m = f.metric();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(w.xmin, w.xmax), uy(w.ymin, w.ymax), ang(0, 2 * kPi), rad(0, 1);
  LipschitzReport rep;
  for (int k = 0; k < pair_samples; ++k) {
    const Point2 x{ux(rng), uy(rng)};
    Point2 y{ux(rng), uy(rng)};
    if (k % 2 == 1) y = x + 0.01 * w.diagonal() * rad(rng) * unit_angle(ang(rng));
    if (!w.contains(y)) continue;
    const double v = f(y) - f(x) - metric_distance(m, x, y);
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_pair = {x, y};
    }
  }
  const double h = 1e-5 * w.diagonal();
  for (int k = 0; k < grad_samples; ++k) {
    const Point2 x{ux(rng), uy(rng)};
    const double f0 = f(x);
    const double fxp = f(x + Vec2{h, 0}), fxm = f(x - Vec2{h, 0});
    const double fyp = f(x + Vec2{0, h}), fym = f(x - Vec2{0, h});
    // One-sided quotients disagreeing means a kink inside the stencil; skip it.
    if (std::abs((fxp - f0) - (f0 - fxm)) > 1e-3 * h || std::abs((fyp - f0) - (f0 - fym)) > 1e-3 * h) continue;
    const Vec2 df{(fxp - fxm) / (2 * h), (fyp - fym) / (2 * h)};
    rep.gradient_norm_max = std::max(rep.gradient_norm_max, m.dual_norm(x, df));
    ++rep.gradient_samples_used;
  }
  rep.passed = rep.max_violation <= opt.violation_tol + f.accuracy() && rep.gradient_norm_max <= 1.0 + opt.gradient_tol;
  return rep;
}

}  // namespace singloc

#endif  // SINGLOC_FIELD_HPP_
