// SPDX-License-Identifier: Apache-2.0
// Invariant suite run against a scenario's oracles; one pass/fail/skip entry per check.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "singloc/io.hpp"

namespace singloc {

enum class CheckStatus { pass, fail, skip };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  io::json detail = io::json::object();
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
  }
};

struct VerifyLimits {
  int min_grid = 32;
  int min_angular_res = 90;
  int lipschitz_pairs = 2000;
  int lipschitz_grads = 200;
  int tree_balls = 50;
  int equivalence_samples = 10;
  double equivalence_delta = 0.2;
  int limit_sequences = 20;
  double max_undetermined = 0.01;
};

/// Ball radius for the local-tree check: 0.2, or just over the 4-spacing minimum on coarse grids.
inline double local_tree_radius(double spacing) { return std::max(0.2, 4.25 * spacing); }

namespace detail {

inline CheckStatus status_of(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

inline io::json point_list(const std::vector<Point2>& ps, std::size_t cap = 20) {
  std::vector<Point2> head(ps.begin(), ps.begin() + static_cast<std::ptrdiff_t>(std::min(cap, ps.size())));
  return io::pts(head);
}

/// Points on edge polylines at least `clear` away (chart distance) from both edge ends.
inline std::vector<Point2> edge_interior_samples(const SingularGraph& g, SingularLabel l, double clear) {
  std::vector<Point2> out;
  for (const auto& e : g.edges) {
    if (e.label != l || e.polyline.size() < 2) continue;
    const Point2 a = e.polyline.front(), b = e.polyline.back();
    for (std::size_t k = 0; k + 1 < e.polyline.size(); ++k) {
      const Vec2 seg = e.polyline[k + 1] - e.polyline[k];
      const int n = std::max(1, static_cast<int>(std::ceil(norm(seg) / g.spacing)));
      for (int s = 0; s < n; ++s) {
        const Point2 q = e.polyline[k] + (static_cast<double>(s) / n) * seg;
        if (norm(q - a) >= clear && norm(q - b) >= clear) out.push_back(g.window.wrap(q));
      }
    }
  }
  return out;
}

}  // namespace detail

/// Checks the configuration itself; everything else is skipped when this fails.
inline CheckResult check_preconditions(const ScenarioConfig& c, const VerifyLimits& lim = {}) {
  CheckResult r{"preconditions", CheckStatus::pass, io::json::object()};
  io::json problems = io::json::array();
  if (c.grid_n < lim.min_grid) problems.push_back("grid " + std::to_string(c.grid_n) + " below " + std::to_string(lim.min_grid));
  if (c.angular_res < lim.min_angular_res)
    problems.push_back("angres " + std::to_string(c.angular_res) + " below " + std::to_string(lim.min_angular_res));
  if (!(c.delta >= 0) || !std::isfinite(c.delta)) problems.push_back("delta must be finite and >= 0");
  if (!(c.cover > 0 && c.cover <= 0.5)) problems.push_back("cover must lie in (0, 0.5]");
  r.detail["problems"] = problems;
  if (!problems.empty()) r.status = CheckStatus::fail;
  return r;
}

/// 1-Lipschitz bound and dual norm of the differential at most one.
inline CheckResult check_lipschitz_bound(const Scenario& s, const VerifyLimits& lim = {}) {
  const auto lr = check_lipschitz(s.field, lim.lipschitz_pairs, lim.lipschitz_grads, s.config.seed);
  const bool ok = lr.passed && lr.max_violation <= 1e-6 && lr.gradient_norm_max <= 1 + 1e-3;
  return {"lipschitz", detail::status_of(ok), io::lipschitz_json(lr)};
}

/// Limit inequalities along approach sequences at random interior points, alternating sense.
inline CheckResult check_limit_sequences(const Scenario& s, const VerifyLimits& lim = {}) {
  const ScalarField& f = s.field;
  const Window w = s.window();
  const ScenarioConfig& cfg = s.config;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const double mx = w.periodic ? 0.0 : 0.1 * w.width(), my = w.periodic ? 0.0 : 0.1 * w.height();
  std::uniform_real_distribution<double> ux(w.xmin + mx, w.xmax - mx), uy(w.ymin + my, w.ymax - my), ua(0, 2 * kPi);
  const double eps0 = 0.05 * std::min(1.0, std::min(w.width(), w.height()));
  const Range rg = f.range();
  int tested = 0, failed = 0, attempts = 0;
  double worst = kInf;
  while (tested < lim.limit_sequences && attempts < 20 * lim.limit_sequences) {
    ++attempts;
    const Point2 p{ux(rng), uy(rng)};
    const double a = ua(rng);
    const double fp = f(p);
    if (!(fp > rg.inf + 4 * eps0 && fp < rg.sup - 4 * eps0)) continue;
    const ApproachSense sense = tested % 2 ? ApproachSense::incoming : ApproachSense::outgoing;
    const auto seq = approach_sequence(f, p, {std::cos(a), std::sin(a)}, sense, 10, eps0);
    if (seq.size() < 4) continue;
    const auto lr = check_limit_inequalities(f, p, seq, sense);
    ++tested;
    failed += !(lr.passed && lr.margin >= -1e-3);
    worst = std::min(worst, lr.margin);
  }
  return {"limit_inequalities", tested == 0 ? CheckStatus::skip : detail::status_of(failed == 0),
          {{"tested", tested}, {"failed", failed}, {"worst_margin", io::num(worst)}}};
}

inline VerifyReport run_verification(const Scenario& s, const VerifyLimits& lim = {}) {
  VerifyReport rep;
  const ScenarioConfig& cfg = s.config;
  rep.checks.push_back(check_preconditions(cfg, lim));
  if (rep.checks.back().status == CheckStatus::fail) return rep;

  const ScalarField& f = s.field;
  const Window w = s.window();
  const Metric m = s.metric();
  const OracleData& o = s.oracle;
  const double acc = f.accuracy();

  rep.checks.push_back(check_lipschitz_bound(s, lim));
  {  // oracle values
    double worst = 0.0;
    const double tol = 1e-9 + 2 * acc;
    for (const auto& v : o.values) worst = std::max(worst, std::abs(f(v.point) - v.value));
    rep.checks.push_back({"oracle_values", o.values.empty() ? CheckStatus::skip : detail::status_of(worst <= tol),
                          {{"count", o.values.size()}, {"max_error", worst}, {"tolerance", tol}}});
  }
  {  // oracle distances
    double worst = 0.0;
    for (const auto& d : o.distances) worst = std::max(worst, std::abs(metric_distance(m, d.from, d.to) - d.value));
    rep.checks.push_back({"oracle_distances", o.distances.empty() ? CheckStatus::skip : detail::status_of(worst <= 1e-9),
                          {{"count", o.distances.size()}, {"max_error", worst}, {"tolerance", 1e-9}}});
  }
  {  // point labels
    ClassifyOptions co;
    co.delta = cfg.delta > 0 ? cfg.delta : 0.005;
    co.angular_res = cfg.angular_res;
    co.fast = false;
    std::vector<Point2> wrong;
    for (const auto& sp : o.singular_points)
      if (classify_point(f, sp.point, co).label != sp.label) wrong.push_back(sp.point);
    rep.checks.push_back({"oracle_labels",
                          o.singular_points.empty() ? CheckStatus::skip : detail::status_of(wrong.empty()),
                          {{"count", o.singular_points.size()}, {"probe_delta", co.delta}, {"mismatches", io::pts(wrong)}}});
  }
  {  // rays certify as f-geodesics
    int bad = 0;
    for (const auto& r : o.rays) {
      const double len = std::min(1.0, 0.9 * r.length);
      const Vec2 u = r.dir / m.norm(r.origin, r.dir);
      const auto seg = integrate_geodesic(m, r.origin, u, len, 1e-2, std::nullopt);
      bad += !certify_f_geodesic(f, seg).certified;
    }
    rep.checks.push_back({"oracle_rays", o.rays.empty() ? CheckStatus::skip : detail::status_of(bad == 0),
                          {{"count", o.rays.size()}, {"uncertified", bad}}});
  }

  // Singular locus graph
  ExtractOptions eo;
  eo.grid_n = cfg.grid_n;
  eo.classify.delta = cfg.delta;
  eo.classify.angular_res = cfg.angular_res;
  const SingularGraph g = extract_singular_locus(f, eo);
  {
    io::json d = {{"grid", cfg.grid_n}, {"spacing", g.spacing}, {"vertices", g.vertices.size()}, {"edges", g.edges.size()},
                  {"undetermined_fraction", g.undetermined_fraction}, {"max_undetermined", lim.max_undetermined}};
    bool ok = g.undetermined_fraction < lim.max_undetermined;
    if (o.upper_locus_complete) {
      const double margin = w.periodic ? 0.0 : 3.0 * g.spacing;
      std::vector<Point2> ref;
      for (Point2 q : o.upper_locus)
        if (w.contains(q, -margin)) ref.push_back(q);
      const auto got = g.locus_points(SingularLabel::upper_singular);
      const double hd = hausdorff(got, ref, w);
      d["upper_locus_hausdorff"] = io::num(hd);
      d["tolerance"] = 2 * g.spacing;
      ok = ok && hd <= 2 * g.spacing * (1 + 1e-9);
    }
    rep.checks.push_back({"singular_locus", detail::status_of(ok), d});
  }
  {  // local tree
    const double r = local_tree_radius(g.spacing);
    if (g.edges.empty()) {
      rep.checks.push_back({"local_tree", CheckStatus::skip, {{"reason", "no edges"}}});
    } else {
      const auto tr = verify_local_tree(g, r, lim.tree_balls, cfg.seed);
      io::json d = io::tree_json(tr);
      d["radius"] = r;
      rep.checks.push_back({"local_tree", detail::status_of(tr.passed), d});
    }
  }
  {  // local cut-locus equivalence at interior points of the extracted locus
    const double de = lim.equivalence_delta;
    const double clear = 0.25 * de + 4.0 * g.spacing;
    std::mt19937_64 rng(cfg.seed);
    io::json samples = io::json::array();
    int tested = 0, failed = 0;
    for (SingularLabel l : {SingularLabel::upper_singular, SingularLabel::lower_singular}) {
      auto pool = detail::edge_interior_samples(g, l, clear);
      std::shuffle(pool.begin(), pool.end(), rng);
      if (pool.size() > static_cast<std::size_t>(lim.equivalence_samples)) pool.resize(lim.equivalence_samples);
      for (Point2 q : pool) {
        const auto er = check_local_cutlocus_equivalence(f, q, de);
        if (!er.applicable) continue;
        ++tested;
        failed += !er.passed;
        samples.push_back({{"point", io::pt(q)}, {"dual", er.dual}, {"gap", io::num(er.hausdorff_gap)},
                           {"spacing", er.spacing}, {"passed", er.passed}});
      }
    }
    rep.checks.push_back({"cutlocus_equivalence", tested == 0 ? CheckStatus::skip : detail::status_of(failed == 0),
                          {{"delta", de}, {"tested", tested}, {"failed", failed}, {"samples", samples}}});
  }
  {  // critical values
    if (!o.critical_values_known) {
      rep.checks.push_back({"critical_values", CheckStatus::skip, {{"reason", "no oracle"}}});
    } else {
      CriticalOptions co;
      co.classify.angular_res = cfg.angular_res;
      const auto est = estimate_critical_values(f, cfg.grid_n, cfg.cover, co);
      auto near = [&](double a, const std::vector<double>& b) {
        return std::any_of(b.begin(), b.end(), [&](double x) { return std::abs(a - x) <= cfg.cover; });
      };
      bool ok = est.measure_upper_bound <= o.critical_values.size() * cfg.cover * (1 + 1e-9);
      for (double v : o.critical_values) ok = ok && near(v, est.values);
      for (double v : est.values) ok = ok && near(v, o.critical_values);
      io::json d = io::critical_json(est);
      d["oracle"] = o.critical_values;
      rep.checks.push_back({"critical_values", detail::status_of(ok), d});
    }
  }
  {  // level sets
    io::json levels = io::json::array();
    bool ok = true;
    for (const auto& lv : o.levels) {
      const auto ls = extract_level_set(f, cfg.grid_n, lv.t);
      const int reg = ls.regular_count();
      bool simple = std::all_of(ls.components.begin(), ls.components.end(), [](const LevelComponent& c) { return c.simple; });
      bool good = lv.regular ? static_cast<int>(ls.components.size()) == lv.components && reg == lv.components && simple && ls.disjoint
                             : reg < static_cast<int>(ls.components.size());
      ok = ok && good;
      levels.push_back({{"t", lv.t}, {"expected_components", lv.components}, {"expected_regular", lv.regular},
                        {"components", ls.components.size()}, {"regular", reg}, {"simple", simple},
                        {"disjoint", ls.disjoint}, {"passed", good}});
    }
    rep.checks.push_back({"level_sets", o.levels.empty() ? CheckStatus::skip : detail::status_of(ok), {{"levels", levels}}});
  }
  {  // f = d_N + c
    if (!o.reconstruction) {
      rep.checks.push_back({"reconstruction", CheckStatus::skip, {{"reason", "no oracle"}}});
    } else {
      const auto rr = check_dist_reconstruction(f, o.reconstruction->c, o.reconstruction->region, cfg.grid_n);
      rep.checks.push_back({"reconstruction", detail::status_of(rr.applicable && rr.passed),
                            {{"c", o.reconstruction->c}, {"applicable", rr.applicable}, {"max_error", io::num(rr.max_error)},
                             {"tolerance", rr.tolerance}, {"note", rr.note}}});
    }
  }
  rep.checks.push_back(check_limit_sequences(s, lim));
  return rep;
}

inline io::json verify_json(const VerifyReport& r) {
  io::json checks = io::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return {{"passed", r.passed()}, {"checks", checks}};
}

}  // namespace singloc
