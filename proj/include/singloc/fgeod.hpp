// SPDX-License-Identifier: Apache-2.0
//
// f-geodesics: unit-speed geodesics along which f grows at unit rate.
// Certification, canonical parameters, direction fans, tracing, maximal
// extension, and the sublevel-segment characterization.

#ifndef SINGLOC_FGEOD_HPP_
#define SINGLOC_FGEOD_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "singloc/core.hpp"
#include "singloc/field.hpp"
#include "singloc/geodesic.hpp"
#include "singloc/metric.hpp"

namespace singloc {

enum class EndReason { lower_singular, upper_singular, window_exit, range_inf, range_sup, length_cap };

inline const char* to_string(EndReason r) {
  switch (r) {
    case EndReason::lower_singular: return "lower-singular";
    case EndReason::upper_singular: return "upper-singular";
    case EndReason::window_exit: return "window-exit";
    case EndReason::range_inf: return "range-inf";
    case EndReason::range_sup: return "range-sup";
    case EndReason::length_cap: return "length-cap";
  }
  return "unknown";
}

struct FGeodesicCertificate {
  GeodesicSegment segment;
  std::string field_id;
  double residual = kInf;  // max - min over samples of f(γ(t)) - t
  double tolerance = 0.0;
  bool certified = false;
  bool canonical = false;
  double minimality_gap = -1.0;  // |length - d(start, end)|; negative when not computed
  std::optional<EndReason> stop;  // set by trace_f_geodesic
};

/// tol_rel * length + 2 * accuracy of f.
inline double certification_tolerance(const ScalarField& f, double length, double tol_rel = 1e-6) {
  return tol_rel * length + 2.0 * f.accuracy() + 1e-13;
}

namespace detail {

inline double residual_of(const ScalarField& f, const GeodesicSegment& seg) {
  double lo = kInf, hi = -kInf;
  for (const auto& s : seg.samples) {
    const double g = f(s.pos) - s.t;
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return seg.samples.empty() ? kInf : hi - lo;
}

// Minimizes fn on [a, b] by golden-section search.
template <class Fn>
std::pair<double, double> golden_min(Fn&& fn, double a, double b, int iters = 60) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int i = 0; i < iters && b - a > 1e-15; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

/// Certifies seg as an f-geodesic when the spread of f(γ(t)) - t stays within tol.
/// tol <= 0 selects certification_tolerance(f, length).
inline FGeodesicCertificate certify_f_geodesic(const ScalarField& f, const GeodesicSegment& seg, double tol = 0.0) {
  FGeodesicCertificate c;
  c.segment = seg;
  c.field_id = f.description();
  c.tolerance = tol > 0 ? tol : certification_tolerance(f, seg.length());
  c.residual = detail::residual_of(f, seg);
  c.certified = c.residual <= c.tolerance;
  const Metric& m = f.metric();
  if (c.certified && m.has_analytic_distance() && seg.length() > 0)
    c.minimality_gap = std::abs(seg.length() - m.analytic_distance(seg.start, seg.end()));
  if (c.certified) {
    double g0 = f(seg.samples.front().pos) - seg.samples.front().t;
    c.canonical = std::abs(g0) <= c.tolerance;
  }
  return c;
}

/// Shifts the parameter so that f(γ(t)) = t (mean offset over samples).
inline FGeodesicCertificate canonical_reparametrize(const ScalarField& f, FGeodesicCertificate cert) {
  if (!cert.certified) throw Error(ErrorCode::invalid_input, "canonical parameter needs a certified f-geodesic");
  double shift = 0.0;
  for (const auto& s : cert.segment.samples) shift += f(s.pos) - s.t;
  shift /= static_cast<double>(cert.segment.samples.size());
  if (std::abs(shift) > cert.tolerance) {
    for (auto& s : cert.segment.samples) s.t += shift;
    cert.segment.t0 += shift;
    cert.segment.t1 += shift;
  }
  cert.canonical = true;
  return cert;
}

// --------------------------------------------------------------------------
// Direction fans

struct FanOptions {
  double delta = 0.0;  // probe length; <= 0 means 1% of the window diagonal
  int angular_res = 720;
  double tol_rel = 1e-6;
  int certify_samples = 8;
  double step = kDefaultGeodesicStep;
};

struct DirectionFan {
  Point2 point;
  double delta = 0.0;
  std::vector<Vec2> incoming_dirs;  // F-unit velocities at the point
  std::vector<Vec2> outgoing_dirs;
  std::vector<double> incoming_residuals;
  std::vector<double> outgoing_residuals;
  bool incoming_continuum = false;
  bool outgoing_continuum = false;
};

inline double fan_delta(const ScalarField& f, const FanOptions& o) {
  return o.delta > 0 ? o.delta : 0.01 * f.window().diagonal();
}

/// Deficit of the stub of length delta leaving p (outgoing) or arriving at p (incoming)
/// with F-unit velocity u; zero exactly on f-geodesic stubs, +inf when the stub leaves the window.
inline double stub_deficit(const ScalarField& f, Point2 p, Vec2 u, double delta, bool outgoing,
                           double step = kDefaultGeodesicStep) {
  const Metric& m = f.metric();
  const Point2 q = outgoing ? geodesic_point(m, p, u, delta, step) : geodesic_point_before(m, p, u, delta, step);
  if (!is_finite(q) || !f.window().contains(q)) return kInf;
  return outgoing ? delta - (f(q) - f(p)) : delta - (f(p) - f(q));
}

/// The stub itself as a forward-oriented segment.
inline GeodesicSegment stub_segment(const Metric& m, Point2 p, Vec2 u, double delta, bool outgoing, int samples,
                                    double step = kDefaultGeodesicStep) {
  const double h = delta / std::max(1, samples);
  if (outgoing) return integrate_geodesic(m, p, u, delta, h);
  if (m.straight_geodesics()) return integrate_geodesic(m, p - delta * u, u, delta, h);
  const auto back = detail::flow(m.reverse(), {p, -u}, delta, step);
  return integrate_geodesic(m, back.x, m.normalize(back.x, -back.v), delta, h);
}

namespace detail {

struct FanSide {
  std::vector<Vec2> dirs;
  std::vector<double> residuals;
  bool continuum = false;
};

inline FanSide scan_side(const ScalarField& f, Point2 p, double delta, bool outgoing, const FanOptions& o) {
  const Metric& m = f.metric();
  const int n = o.angular_res;
  const double dth = 2 * kPi / n;
  const double tol = certification_tolerance(f, delta, o.tol_rel);
  auto dir = [&](double th) { return m.normalize(p, unit_angle(th)); };
  auto deficit = [&](double th) { return stub_deficit(f, p, dir(th), delta, outgoing, o.step); };
  std::vector<double> D(n);
  for (int k = 0; k < n; ++k) D[k] = deficit(k * dth);
  auto at = [&](int k) { return D[((k % n) + n) % n]; };

  FanSide side;
  auto certify_dir = [&](double th, double& res) {
    const Vec2 u = dir(th);
    const auto seg = stub_segment(m, p, u, delta, outgoing, o.certify_samples, o.step);
    res = residual_of(f, seg);
    return res <= tol;
  };

  // Runs of accepted raw samples.
  std::vector<int> run_id(n, -1);
  int runs = 0;
  bool all = true;
  for (int k = 0; k < n; ++k) all = all && D[k] <= tol;
  if (all) {
    std::fill(run_id.begin(), run_id.end(), 0);
    runs = 1;
  } else {
    int start = 0;
    while (D[start] <= tol) ++start;  // a rejected sample exists
    for (int s = 1; s <= n; ++s) {
      const int k = (start + s) % n;
      if (D[k] > tol) continue;
      const int prev = (k + n - 1) % n;
      run_id[k] = D[prev] <= tol && run_id[prev] >= 0 ? run_id[prev] : runs++;
    }
  }
  std::vector<int> run_len(runs, 0);
  for (int k = 0; k < n; ++k)
    if (run_id[k] >= 0) ++run_len[run_id[k]];

  // Continuum fans are kept sample by sample; only exact fields can witness them.
  std::vector<char> run_done(runs, 0);
  if (f.accuracy() == 0.0) {
    for (int k = 0; k < n; ++k) {
      const int r = run_id[k];
      if (r < 0 || run_len[r] < 3) continue;
      double res;
      if (certify_dir(k * dth, res)) {
        side.dirs.push_back(dir(k * dth));
        side.residuals.push_back(res);
      }
      run_done[r] = 1;
      side.continuum = true;
    }
  }

  // Isolated minima: refine, certify, and keep the best per run.
  struct Cand {
    double th, d;
    int run;
  };
  std::vector<Cand> cands;
  const double gate = tol + 4.0 * delta * dth * dth + 1e-12;
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(D[k]) || D[k] > gate) continue;
    if (D[k] > at(k - 1) || D[k] > at(k + 1)) continue;
    if (run_id[k] >= 0 && run_done[run_id[k]]) continue;
    auto [th, d] = golden_min(deficit, (k - 1) * dth, (k + 1) * dth);
    if (d > tol) continue;
    cands.push_back({th, d, run_id[k]});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
  std::vector<double> kept;
  std::vector<int> kept_runs;
  for (const auto& c : cands) {
    bool dup = false;
    for (std::size_t i = 0; i < kept.size(); ++i)
      dup = dup || std::abs(angle_diff(kept[i], c.th)) <= dth || (c.run >= 0 && kept_runs[i] == c.run);
    if (dup) continue;
    double res;
    if (!certify_dir(c.th, res)) continue;
    kept.push_back(c.th);
    kept_runs.push_back(c.run);
    side.dirs.push_back(dir(c.th));
    side.residuals.push_back(res);
  }
  return side;
}

}  // namespace detail

/// Scans angular_res directions at p for certified f-geodesic stubs of length delta
/// arriving at and leaving p. An empty fan in the range interior flags an
/// almost-distance violation.
inline DirectionFan direction_fan(const ScalarField& f, Point2 p, const FanOptions& o = {}) {
  if (o.angular_res < 8) throw Error(ErrorCode::invalid_input, "angular resolution must be >= 8");
  DirectionFan fan;
  fan.point = p;
  fan.delta = fan_delta(f, o);
  auto in = detail::scan_side(f, p, fan.delta, false, o);
  auto out = detail::scan_side(f, p, fan.delta, true, o);
  fan.incoming_dirs = std::move(in.dirs);
  fan.incoming_residuals = std::move(in.residuals);
  fan.incoming_continuum = in.continuum;
  fan.outgoing_dirs = std::move(out.dirs);
  fan.outgoing_residuals = std::move(out.residuals);
  fan.outgoing_continuum = out.continuum;
  return fan;
}

/// Searches for a certified stub whose direction lies within half_width of angle center.
inline std::optional<Vec2> local_stub(const ScalarField& f, Point2 p, double delta, bool outgoing, double center,
                                      double half_width, const FanOptions& o = {}) {
  const Metric& m = f.metric();
  auto dir = [&](double th) { return m.normalize(p, unit_angle(th)); };
  auto deficit = [&](double th) { return stub_deficit(f, p, dir(th), delta, outgoing, o.step); };
  const auto [th, d] = detail::golden_min(deficit, center - half_width, center + half_width);
  const double tol = certification_tolerance(f, delta, o.tol_rel);
  if (!(d <= tol)) return std::nullopt;
  const auto seg = stub_segment(m, p, dir(th), delta, outgoing, o.certify_samples, o.step);
  if (detail::residual_of(f, seg) > tol) return std::nullopt;
  return dir(th);
}

/// Finsler gradient: the Legendre vector of the central-difference differential.
inline Vec2 finsler_gradient(const ScalarField& f, Point2 x, double h = 1e-6) {
  return f.metric().legendre_vector(x, fd_differential(f, x, h));
}

// --------------------------------------------------------------------------
// Tracing

enum class Sense { forward, backward };

struct TraceOptions {
  double tol_rel = 1e-6;
  int recertify_every = 50;
  double range_margin = 1e-9;
  std::optional<Vec2> initial_dir;  // F-unit velocity at p; skips the fan at p
  FanOptions fan;
};

namespace detail {

// Follows the geodesic of `me` (m, or its reverse for backward tracing) while the
// deficit t - s(f(γ(t)) - f(p)) stays within tolerance; s = +1 forward, -1 backward.
inline std::pair<std::vector<GeodesicSample>, EndReason> follow(const ScalarField& f, const Metric& me, Point2 p,
                                                                Vec2 u, double sgn, double step, double max_len,
                                                                const TraceOptions& o) {
  const Window& w = f.window();
  const double f0 = f(p);
  const Range r = f.range();
  std::vector<GeodesicSample> out{{0.0, p, u}};
  auto state_at = [&](double t) {
    // Latest sample at or before t, then integrate the remainder.
    auto it = std::upper_bound(out.begin(), out.end(), t, [](double v, const GeodesicSample& s) { return v < s.t; });
    const GeodesicSample& s = *std::prev(it);
    if (me.straight_geodesics()) return GeoState{p + t * u, u};
    return flow(me, {s.pos, s.vel}, t - s.t, step);
  };
  auto deficit = [&](double t, Point2 x) { return t - sgn * (f(x) - f0); };
  auto tol = [&](double t) { return certification_tolerance(f, t, o.tol_rel); };
  auto truncate_to = [&](double t_end) {
    const GeoState s = state_at(t_end);
    while (!out.empty() && out.back().t >= t_end) out.pop_back();
    out.push_back({t_end, s.x, s.v});
  };

  double t = 0.0, t_ok = 0.0;
  GeoState s{p, u};
  int count = 0;
  while (t < max_len - 1e-15) {
    const double h = std::min(step, max_len - t);
    const GeoState next = me.straight_geodesics() ? GeoState{p + (t + h) * u, u} : rk4_step(me, s, h);
    if (!is_finite(next.x)) throw Error(ErrorCode::numeric_failure, "geodesic integration diverged");
    if (!w.contains(next.x)) return {out, EndReason::window_exit};
    s = next;
    t += h;
    out.push_back({t, s.x, s.v});
    ++count;
    const bool last = t >= max_len - 1e-15;
    const double v = f(s.x);
    // A finite bound that is attained makes the point singular.
    if (sgn > 0 && v >= r.sup - o.range_margin) return {out, v > r.sup + tol(t) ? EndReason::range_sup : EndReason::upper_singular};
    if (sgn < 0 && v <= r.inf + o.range_margin) return {out, v < r.inf - tol(t) ? EndReason::range_inf : EndReason::lower_singular};
    if (count % o.recertify_every != 0 && !last) continue;
    if (deficit(t, s.x) <= tol(t)) {
      t_ok = t;
      continue;
    }
    // The deficit is nondecreasing in t for 1-Lipschitz f; bisect at noise level for
    // the time where it starts to grow.
    double lo = t_ok, hi = t;
    auto noise = [&](double tt) { return 2.0 * f.accuracy() + 1e-12 * (1.0 + tt); };
    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (deficit(mid, state_at(mid).x) <= noise(mid)) lo = mid;
      else hi = mid;
    }
    truncate_to(lo);
    return {out, sgn > 0 ? EndReason::upper_singular : EndReason::lower_singular};
  }
  return {out, EndReason::length_cap};
}

}  // namespace detail

/// Traces the f-geodesic through p forward (leaving p) or backward (arriving at p),
/// stopping at a singular point, window exit, range bound, or max_len. The result is a
/// canonical certificate oriented forward in time.
inline FGeodesicCertificate trace_f_geodesic(const ScalarField& f, Point2 p, Sense sense, double step, double max_len,
                                             const TraceOptions& o = {}) {
  if (!(step > 0) || !(max_len > 0)) throw Error(ErrorCode::invalid_input, "step and max_len must be positive");
  const Metric& m = f.metric();
  Vec2 u;
  if (o.initial_dir) {
    u = m.normalize(p, *o.initial_dir);
  } else {
    const DirectionFan fan = direction_fan(f, p, o.fan);
    const auto& dirs = sense == Sense::forward ? fan.outgoing_dirs : fan.incoming_dirs;
    if (dirs.size() > 1) throw Error(ErrorCode::not_differentiable, "several f-geodesics pass through the start point");
    if (dirs.empty()) throw Error(ErrorCode::not_applicable, "no f-geodesic in the requested sense at the start point");
    u = dirs.front();
  }
  const bool fwd = sense == Sense::forward;
  const Metric me = fwd ? m : m.reverse();
  auto [samples, reason] = detail::follow(f, me, p, fwd ? u : -u, fwd ? 1.0 : -1.0, step, max_len, o);
  GeodesicSegment seg;
  seg.metric_name = m.name();
  seg.truncated = reason == EndReason::window_exit;
  if (fwd) {
    seg.samples = std::move(samples);
  } else {
    const double T = samples.back().t;
    for (auto it = samples.rbegin(); it != samples.rend(); ++it) seg.samples.push_back({T - it->t, it->pos, -it->vel});
  }
  seg.start = seg.samples.front().pos;
  seg.start_dir = seg.samples.front().vel;
  seg.t0 = seg.samples.front().t;
  seg.t1 = seg.samples.back().t;
  FGeodesicCertificate cert;
  if (seg.samples.size() < 2) {
    cert.segment = seg;
    cert.field_id = f.description();
    cert.residual = 0.0;
    cert.certified = true;
  } else {
    cert = certify_f_geodesic(f, seg, certification_tolerance(f, seg.length(), o.tol_rel));
  }
  cert.stop = reason;
  if (cert.certified) cert = canonical_reparametrize(f, cert);
  return cert;
}

struct FGeodesicEnd {
  Point2 point;
  EndReason reason = EndReason::length_cap;
  bool extension_blocked = false;  // a probe continuation of length delta fails certification
};

struct MaximalFGeodesic {
  FGeodesicCertificate certificate;
  FGeodesicEnd backward_end;
  FGeodesicEnd forward_end;
  double junction_jump = 0.0;  // velocity jump measured by finite differences at the junctions
};

struct ExtensionOptions {
  double step = 1e-3;
  double max_len = 0.0;  // <= 0 means four window diagonals
  TraceOptions trace;
};

/// Extends a certified f-geodesic both ways until it stops.
inline MaximalFGeodesic maximal_extension(const ScalarField& f, const FGeodesicCertificate& cert,
                                          const ExtensionOptions& o = {}) {
  if (!cert.certified) throw Error(ErrorCode::invalid_input, "maximal extension needs a certified f-geodesic");
  const Metric& m = f.metric();
  const double max_len = o.max_len > 0 ? o.max_len : 4.0 * f.window().diagonal();
  const auto& cs = cert.segment.samples;
  TraceOptions tf = o.trace, tb = o.trace;
  tf.initial_dir = cs.back().vel;
  tb.initial_dir = cs.front().vel;
  const auto fw = trace_f_geodesic(f, cs.back().pos, Sense::forward, o.step, max_len, tf);
  const auto bw = trace_f_geodesic(f, cs.front().pos, Sense::backward, o.step, max_len, tb);

  GeodesicSegment seg;
  seg.metric_name = m.name();
  const auto& bs = bw.segment.samples;
  const auto& fs = fw.segment.samples;
  std::vector<std::size_t> junctions;
  for (std::size_t i = 0; i + 1 < bs.size(); ++i) seg.samples.push_back(bs[i]);
  junctions.push_back(seg.samples.size());
  const double base = seg.samples.empty() ? 0.0 : bs.back().t - cs.front().t;
  for (const auto& s : cs) seg.samples.push_back({s.t + base, s.pos, s.vel});
  junctions.push_back(seg.samples.size() - 1);
  const double base2 = seg.samples.back().t - fs.front().t;
  for (std::size_t i = 1; i < fs.size(); ++i) seg.samples.push_back({fs[i].t + base2, fs[i].pos, fs[i].vel});
  seg.start = seg.samples.front().pos;
  seg.start_dir = seg.samples.front().vel;
  seg.t0 = seg.samples.front().t;
  seg.t1 = seg.samples.back().t;
  seg.truncated = fw.stop == EndReason::window_exit || bw.stop == EndReason::window_exit;

  MaximalFGeodesic res;
  for (std::size_t j : junctions) {
    if (j == 0 || j + 1 >= seg.samples.size()) continue;
    const auto& a = seg.samples[j - 1];
    const auto& b = seg.samples[j + 1];
    if (b.t - a.t <= 0) continue;
    // Chord velocity vs the tangent; the chord error of a smooth curve is O(h^2).
    const Vec2 chord = (b.pos - a.pos) / (b.t - a.t);
    const double h = b.t - a.t;
    res.junction_jump = std::max(res.junction_jump, std::max(0.0, norm(chord - seg.samples[j].vel) - h * h));
  }
  res.certificate = certify_f_geodesic(f, seg, certification_tolerance(f, seg.length(), o.trace.tol_rel));
  if (res.certificate.certified) res.certificate = canonical_reparametrize(f, res.certificate);

  const double delta = fan_delta(f, o.trace.fan);
  auto blocked = [&](Point2 q, Vec2 v, bool outgoing) {
    const double d = stub_deficit(f, q, v, delta, outgoing, o.step);
    return !std::isfinite(d) || d > certification_tolerance(f, delta, o.trace.tol_rel);
  };
  res.backward_end = {seg.samples.front().pos, *bw.stop, false};
  res.forward_end = {seg.samples.back().pos, *fw.stop, false};
  if (*bw.stop != EndReason::window_exit && *bw.stop != EndReason::length_cap)
    res.backward_end.extension_blocked = blocked(seg.samples.front().pos, seg.samples.front().vel, false);
  if (*fw.stop != EndReason::window_exit && *fw.stop != EndReason::length_cap)
    res.forward_end.extension_blocked = blocked(seg.samples.back().pos, seg.samples.back().vel, true);
  return res;
}

/// Maximal f-geodesic through p: a short forward stub (backward when p ends every
/// f-geodesic through it), then maximal extension. Empty when no stub certifies.
inline std::optional<MaximalFGeodesic> maximal_f_geodesic_through(const ScalarField& f, Point2 p,
                                                                  const ExtensionOptions& o = {}) {
  const Window& w = f.window();
  const double stub = 0.02 * std::min(w.width(), w.height());
  FGeodesicCertificate cert = trace_f_geodesic(f, p, Sense::forward, o.step, stub, o.trace);
  if (!cert.certified || cert.segment.length() <= 0) cert = trace_f_geodesic(f, p, Sense::backward, o.step, stub, o.trace);
  if (!cert.certified || cert.segment.length() <= 0) return std::nullopt;
  return maximal_extension(f, cert, o);
}

// --------------------------------------------------------------------------
// Sublevel segments

struct SublevelDistance {
  double distance = kInf;
  Vec2 direction;  // F-unit velocity at the target of the minimizing arrival
  Point2 foot;
};

struct SublevelOptions {
  int angular_res = 360;
  double scan_step = 0.0;  // <= 0 means 0.2% of the window diagonal
  double max_len = 0.0;    // <= 0 means two window diagonals
  double step = kDefaultGeodesicStep;
};

/// d(M^a, q) with M^a = f^{-1}(-inf, a], searched over geodesics arriving at q.
inline SublevelDistance distance_to_sublevel(const ScalarField& f, Point2 q, double a, const SublevelOptions& o = {}) {
  const Metric& m = f.metric();
  SublevelDistance res;
  if (f(q) <= a) {
    res.distance = 0.0;
    res.foot = q;
    return res;
  }
  const double ds = o.scan_step > 0 ? o.scan_step : 0.002 * f.window().diagonal();
  const double smax = o.max_len > 0 ? o.max_len : 2.0 * f.window().diagonal();
  const double s0 = f(q) - a;  // lower bound by the Lipschitz inequality
  auto first_hit = [&](double th) {
    const Vec2 u = m.normalize(q, unit_angle(th));
    auto g = [&](double s) { return f(geodesic_point_before(m, q, u, s, o.step)) - a; };
    double prev = s0, s = s0;
    if (g(s) > 0) {
      bool hit = false;
      while (s < smax) {
        prev = s;
        s = std::min(smax, s + ds);
        if (g(s) <= 0) {
          hit = true;
          break;
        }
      }
      if (!hit) return kInf;
      double lo = prev, hi = s;
      for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0) hi = mid;
        else lo = mid;
      }
      s = hi;
    }
    return s;
  };
  const double dth = 2 * kPi / o.angular_res;
  double best = kInf, best_th = 0;
  for (int k = 0; k < o.angular_res; ++k) {
    const double s = first_hit(k * dth);
    if (s < best) {
      best = s;
      best_th = k * dth;
    }
  }
  if (!std::isfinite(best)) return res;
  const auto [th, s] = detail::golden_min(first_hit, best_th - dth, best_th + dth, 50);
  if (s < best) {
    best = s;
    best_th = th;
  }
  res.distance = best;
  res.direction = m.normalize(q, unit_angle(best_th));
  res.foot = geodesic_point_before(m, q, res.direction, best, o.step);
  return res;
}

struct CharacterizationReport {
  double segment_length = 0.0;
  double sublevel_distance = kInf;
  double gap = kInf;  // |segment_length - sublevel_distance|
  bool segment_ok = false;
  int crossing_samples = 0;
  int crossing_found = 0;
  bool crossing_ok = false;
  bool passed = false;
};

struct CharacterizationOptions {
  double tol = 0.0;  // <= 0 means certification tolerance plus the sublevel search resolution
  int crossing_samples = 5;
  double tail_fraction = 0.2;
  SublevelOptions sublevel;
  FanOptions fan;
};

/// Checks that a canonical f-geodesic starting at level a1 is a segment from the sublevel
/// set M^{a1}, and that points near its far end receive f-geodesics crossing M^{a1}.
inline CharacterizationReport check_segment_characterization(const ScalarField& f, const FGeodesicCertificate& cert,
                                                             double a1, const CharacterizationOptions& o = {}) {
  if (!cert.certified || !cert.canonical) throw Error(ErrorCode::invalid_input, "need a certified canonical f-geodesic");
  const auto& s = cert.segment.samples;
  if (std::abs(s.front().t - a1) > cert.tolerance + 1e-9) throw Error(ErrorCode::invalid_input, "a1 must be the start value");
  const Metric& m = f.metric();
  CharacterizationReport rep;
  rep.segment_length = cert.segment.length();
  const double tol = o.tol > 0 ? o.tol : cert.tolerance + 1e-9;
  rep.sublevel_distance = distance_to_sublevel(f, s.back().pos, a1, o.sublevel).distance;
  rep.gap = std::abs(rep.segment_length - rep.sublevel_distance);
  rep.segment_ok = rep.gap <= tol;

  const double L = rep.segment_length;
  for (int j = 1; j <= o.crossing_samples; ++j) {
    const double t = s.back().t - o.tail_fraction * L * j / (o.crossing_samples + 1);
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const GeodesicSample& g, double v) { return g.t < v; });
    if (it == s.end() || it == s.begin()) continue;
    const GeodesicSample& g = *it;
    const double len = f(g.pos) - a1;
    if (!(len > 0)) continue;
    ++rep.crossing_samples;
    FanOptions fo = o.fan;
    auto found = local_stub(f, g.pos, len, false, angle_of(g.vel), 0.25, fo);
    if (!found) {
      fo.delta = len;
      const auto fan = direction_fan(f, g.pos, fo);
      if (!fan.incoming_dirs.empty()) found = fan.incoming_dirs.front();
    }
    if (!found) continue;
    // The arriving f-geodesic of length f(x) - a1 starts on the level a1, so it meets M^{a1}.
    const Point2 start = geodesic_point_before(m, g.pos, *found, len);
    if (f(start) <= a1 + tol) ++rep.crossing_found;
  }
  rep.crossing_ok = rep.crossing_samples > 0 && rep.crossing_found == rep.crossing_samples;
  rep.passed = rep.segment_ok && rep.crossing_ok;
  return rep;
}

}  // namespace singloc

#endif  // SINGLOC_FGEOD_HPP_
