// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments select criteria by number.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "singloc/singloc.hpp"

using namespace singloc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Point2> exact_torus_cross(int n) {
  std::vector<Point2> out;
  for (int k = 0; k < n; ++k) {
    out.push_back({0.5, (k + 0.5) / n});
    out.push_back({(k + 0.5) / n, 0.5});
  }
  return out;
}

double grid_spacing(const Scenario& s) { return s.window().width() / s.config.grid_n; }

// Gradient law at singleton-fan points.
void gradient_law(Outcome& r) {
  for (const char* name : {"euclidean_point", "busemann_x", "randers_wind"}) {
    const auto t0 = Clock::now();
    const Scenario s = make_scenario(name);
    const Window w = s.window();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(w.xmin + 0.05 * w.width(), w.xmax - 0.05 * w.width()),
        uy(w.ymin + 0.05 * w.height(), w.ymax - 0.05 * w.height());
    int used = 0, attempts = 0;
    double worst = 0.0;
    while (used < 1000 && attempts < 3000) {
      ++attempts;
      const Point2 p{ux(rng), uy(rng)};
      const auto cd = generalized_differential(s.field, p);
      if (cd.generators.size() != 1) continue;
      const Vec2 df = fd_differential(s.field, p, 1e-5);
      const Vec2 c = cd.generators[0].components;
      worst = std::max({worst, std::abs(c.x - df.x), std::abs(c.y - df.y)});
      ++used;
    }
    const double t = seconds_since(t0);
    r.detail << name << ": n=" << used << " err=" << worst << " t=" << t << "s; ";
    r.require(used == 1000, std::string(name) + " singleton samples");
    r.require(worst <= 1e-3, std::string(name) + " covector error");
    r.require(t < 60, std::string(name) + " runtime");
  }
}

// One-sided difference quotients across the locus disagree.
void non_differentiability(Outcome& r) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> side(0.1, 0.4), flip(0, 1);
  const double h = 1e-4;
  auto jump = [h](const ScalarField& f, Point2 p, Vec2 v) {
    const double fp = f(p);
    return std::abs((f(p + h * v) - fp) / h - (fp - f(p - h * v)) / h);
  };
  const Scenario torus = make_scenario("flat_torus");
  const Scenario two = make_scenario("two_point_dN");
  int multi = 0, detected = 0;
  double least = kInf;
  for (int k = 0; k < 100; ++k) {
    // Cross: a coordinate in [0.1, 0.4] or [0.6, 0.9] keeps away from the vertex and the source.
    double a = side(rng);
    if (flip(rng) < 0.5) a = 1 - a;
    const bool vertical = k % 2 == 0;
    const Point2 p = vertical ? Point2{0.5, a} : Point2{a, 0.5};
    const Vec2 v = vertical ? Vec2{1, 0} : Vec2{0, 1};
    multi += classify_point(torus.field, p).in_count >= 2;
    const double j = jump(torus.field, p, v);
    least = std::min(least, j);
    detected += j > 0.1;
  }
  std::uniform_real_distribution<double> uy(-2.5, 2.5);
  for (int k = 0; k < 100; ++k) {
    double y = uy(rng);
    if (std::abs(y) < 0.1) y = std::copysign(0.1, y == 0 ? 1.0 : y);
    const Point2 p{0, y};
    multi += classify_point(two.field, p).in_count >= 2;
    const double j = jump(two.field, p, {1, 0});
    least = std::min(least, j);
    detected += j > 0.1;
  }
  r.detail << "multiplicity>=2: " << multi << "/200, detected: " << detected << "/200, least jump " << least;
  r.require(multi == 200, "multiplicity");
  r.require(detected == 200, "quotient jump");
}

// Torus cut locus at grid 512.
void torus_cut_locus(Outcome& r) {
  const auto t0 = Clock::now();
  const Scenario s = make_scenario("flat_torus");
  const auto g = extract_singular_locus(s.field, {512, {}});
  const double hd = hausdorff(g.locus_points(SingularLabel::upper_singular), exact_torus_cross(2048), s.window());
  const auto tree = verify_local_tree(g, 0.2, 50, 3);
  const double t = seconds_since(t0);
  r.detail << "hausdorff " << hd << " (tol " << 2.0 / 512 << "), balls " << tree.balls_tested << " cycles "
           << tree.cycles_found << " conn " << tree.connectivity_failures << ", t=" << t << "s";
  r.require(hd <= 2.0 / 512, "hausdorff");
  r.require(tree.passed && tree.balls_tested == 50, "local tree");
  r.require(t < 120, "runtime");
}

// d_N: ridge tips, probe values and the ray through (2, 0).
void construction_dN(Outcome& r) {
  const Scenario s = make_scenario("section7_dN");
  const auto c = disk_construction(s.config.K);
  const double h = grid_spacing(s);
  ClassifyOptions co;
  co.delta = 0.005;
  co.fast = false;
  // Localization: some node of the h-lattice within 2h of p_i labelled upper-singular at probe length h.
  ClassifyOptions grid_co;
  grid_co.delta = h;
  int exact = 0, localized = 0;
  for (int i = 0; i < 6; ++i) {
    exact += classify_point(s.field, c.p[i], co).label == SingularLabel::upper_singular;
    bool found = false;
    for (int a = -2; a <= 2 && !found; ++a)
      for (int b = -2; b <= 2 && !found; ++b) {
        const Point2 q = c.p[i] + Vec2{a * h, b * h};
        if (norm(q - c.p[i]) <= 2 * h) found = classify_point(s.field, q, grid_co).label == SingularLabel::upper_singular;
      }
    localized += found;
  }
  r.detail << "p_1..p_6 upper: " << exact << "/6, localized: " << localized << "/6; ";
  r.require(exact == 6 && localized == 6, "ridge tips");
  double worst = 0.0;
  for (double t : {1.5, -1.5, 3.0, -3.0, 5.0, -5.0}) worst = std::max(worst, std::abs(s.field({t, 0}) - (std::abs(t) - 1)));
  r.detail << "probe error " << worst << "; ";
  r.require(worst <= 2 * h, "probe values");
  const auto pc = classify_point(s.field, {2, 0});
  r.require(pc.label == SingularLabel::regular, "(2,0) regular");
  TraceOptions to;
  ExtensionOptions xo;
  xo.trace = to;
  const auto mx = maximal_f_geodesic_through(s.field, {2, 0}, xo);
  r.require(mx.has_value() && mx->certificate.certified, "traced f-geodesic");
  if (!mx) return;
  double off = 0.0;
  for (const auto& smp : mx->certificate.segment.samples) {
    const Point2 q = smp.pos;
    off = std::max(off, q.x >= 1 ? std::abs(q.y) : norm(q - Point2{1, 0}));
  }
  const Point2 b = mx->backward_end.point, e = mx->forward_end.point;
  r.detail << "(2,0) " << to_string(pc.label) << ", trace from (" << b.x << "," << b.y << ") to (" << e.x << "," << e.y
           << ") off-ray " << off;
  r.require(off <= 2 * h, "trace stays on the ray");
  r.require(norm(b - Point2{1, 0}) <= 2 * h, "trace starts at (1,0)");
  r.require(mx->forward_end.reason == EndReason::window_exit && e.x >= s.window().xmax - 2 * h, "trace reaches the window edge");
}

// Combined field: both loci accumulate at the regular point (2, 0).
void combined_closure(Outcome& r) {
  const Scenario s = make_scenario("section7_combined");
  ClassifyOptions co;
  co.delta = 0.005;
  co.fast = false;
  int up = 0, low = 0;
  for (Point2 p : s.oracle.upper_locus)
    if (norm(p - Point2{2, 0}) < 0.2) up += classify_point(s.field, p, co).label == SingularLabel::upper_singular;
  for (Point2 p : s.oracle.lower_locus)
    if (norm(p - Point2{2, 0}) < 0.2) low += classify_point(s.field, p, co).label == SingularLabel::lower_singular;
  const auto pc = classify_point(s.field, {2, 0});
  r.detail << "within 0.2 of (2,0): upper " << up << ", lower " << low << "; (2,0) " << to_string(pc.label);
  r.require(up > 0 && low > 0, "both loci near (2,0)");
  r.require(pc.label == SingularLabel::regular, "(2,0) regular");
}

// Critical-value covers shrink with the cover width.
void sard_surrogate(Outcome& r) {
  const int n = 128;
  for (const auto& [name, mult] : std::vector<std::pair<std::string, double>>{{"two_point_dN", 2}, {"flat_torus", 3}}) {
    const Scenario s = make_scenario(name);
    for (double w : {1e-2, 1e-3, 1e-4}) {
      const auto t0 = Clock::now();
      const auto e = estimate_critical_values(s.field, n, w);
      const double t = seconds_since(t0);
      r.detail << name << "@" << w << ": " << e.measure_upper_bound << " (" << t << "s); ";
      r.require(e.measure_upper_bound <= mult * w * (1 + 1e-9), name + " bound");
      r.require(t < 60, name + " runtime");
    }
  }
  const auto e = estimate_critical_values(make_scenario("euclidean_point").field, n, 1e-2);
  r.detail << "euclidean_point: " << e.measure_upper_bound;
  r.require(e.measure_upper_bound == 0.0, "euclidean bound");
}

// Level sets of the two-point distance.
void level_sets(Outcome& r) {
  const Scenario s = make_scenario("two_point_dN");
  const int n = 128;
  auto all_simple = [](const LevelSet& ls) {
    return std::all_of(ls.components.begin(), ls.components.end(), [](const LevelComponent& c) { return c.simple; });
  };
  const auto a = extract_level_set(s.field, n, 0.5);
  const auto b = extract_level_set(s.field, n, 1.5);
  const auto c = extract_level_set(s.field, n, 1.0);
  const bool flagged =
      std::any_of(c.components.begin(), c.components.end(), [](const LevelComponent& k) { return !k.regular; });
  r.detail << "t=0.5: " << a.components.size() << " (" << a.regular_count() << " regular); t=1.5: " << b.components.size()
           << " (" << b.regular_count() << " regular); t=1: non-regular flagged " << flagged;
  r.require(a.components.size() == 2 && a.regular_count() == 2 && all_simple(a) && a.disjoint, "t=0.5");
  r.require(b.components.size() == 1 && b.regular_count() == 1 && all_simple(b) && b.disjoint, "t=1.5");
  r.require(flagged, "t=1");
}

// Local equivalence of the sublevel cut locus and the singular locus.
void local_equivalence(Outcome& r) {
  const double delta = 0.2;
  auto run = [&](const char* name, const ScalarField& f, const std::vector<Point2>& pts, bool dual) {
    int ok = 0;
    double worst = 0.0;
    for (Point2 p : pts) {
      const auto e = check_local_cutlocus_equivalence(f, p, delta);
      ok += e.applicable && e.dual == dual && e.passed;
      worst = std::max(worst, e.hausdorff_gap / e.spacing);
    }
    r.detail << name << ": " << ok << "/" << pts.size() << " (worst gap " << worst << "h); ";
    r.require(ok == static_cast<int>(pts.size()), name);
  };
  // Torus cross away from the vertex, where f(p) + delta/2 stays below the maximum sqrt(1/2).
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> side(0.1, 0.3), flip(0, 1);
  std::vector<Point2> torus_pts;
  for (int k = 0; k < 10; ++k) {
    double a = side(rng);
    if (flip(rng) < 0.5) a = 1 - a;
    torus_pts.push_back(k % 2 ? Point2{a, 0.5} : Point2{0.5, a});
  }
  run("flat_torus", make_scenario("flat_torus").field, torus_pts, false);
  const auto c = disk_construction(8);
  // Ridge of d_N behind p_1 while its slope break stays above the detection threshold.
  std::vector<Point2> ridge;
  const Vec2 out = c.p[0] / norm(c.p[0]);
  for (int k = 0; k < 10; ++k) ridge.push_back(c.p[0] + (0.1 + 0.05 * k) * out);
  run("section7_dN", make_scenario("section7_dN").field, ridge, false);
  // Lower segments [o, u_1] and [o, u_2] of eta.
  std::vector<Point2> lower;
  for (int i = 0; i < 2; ++i)
    for (double t : {0.2, 0.3, 0.4, 0.5, 0.6}) lower.push_back(t * c.u[i]);
  run("section7_eta", make_scenario("section7_eta").field, lower, true);
}

// Every shipped field is 1-Lipschitz.
void lipschitz_all(Outcome& r) {
  int bad = 0;
  for (const auto& name : scenario_names()) {
    const auto cr = check_lipschitz_bound(make_scenario(name));
    if (cr.status != CheckStatus::pass) {
      ++bad;
      r.detail << name << " " << cr.detail.dump() << "; ";
    }
  }
  r.detail << scenario_names().size() - bad << "/" << scenario_names().size() << " fields pass";
  r.require(bad == 0, "lipschitz");
}

// Asymmetric distances of the Randers wind.
void asymmetry(Outcome& r) {
  const Scenario s = make_scenario("randers_wind");
  const Metric& m = s.metric();
  const Point2 o{0, 0}, x{1, 0};
  const double there = metric_distance(m, o, x), back = metric_distance(m, x, o);
  const auto from = dist_from_set(m, ClosedSet::point(o), s.window());
  const auto to = neg_dist_to_set(m, ClosedSet::point(o), s.window());
  r.detail << "d(o,x)=" << there << " d(x,o)=" << back << " dist_from=" << from(x) << " neg_dist_to=" << to(x);
  r.require(std::abs(there - 2.0 / 3) <= 1e-6 && std::abs(back - 2.0) <= 1e-6, "distances");
  r.require(std::abs(from(x) - 2.0 / 3) <= 1e-6 && std::abs(to(x) + 2.0) <= 1e-6, "fields");
}

// Limit inequalities along approach sequences.
void limit_inequalities(Outcome& r) {
  VerifyLimits lim;
  lim.limit_sequences = 20;
  for (const char* name : {"flat_torus", "busemann_x", "section7_dN"}) {
    const auto cr = check_limit_sequences(make_scenario(name), lim);
    r.detail << name << ": " << cr.detail["tested"] << " tested, worst margin " << cr.detail["worst_margin"] << "; ";
    r.require(cr.status == CheckStatus::pass && cr.detail["tested"] == 20, name);
  }
}

// f = d_N + c.
void reconstruction(Outcome& r) {
  const Scenario disk = make_scenario("disk_plus_one");
  const auto a = check_dist_reconstruction(disk.field, 1.0, {}, disk.config.grid_n);
  const Scenario comb = make_scenario("section7_combined");
  const auto b = check_dist_reconstruction(comb.field, 1.0, Window{-6, 6, 0, 6, false}, comb.config.grid_n);
  r.detail << "disk_plus_one error " << a.max_error << "; combined (y>=0) error " << b.max_error << " (tol " << b.tolerance << ")";
  r.require(a.applicable && a.passed, "disk_plus_one");
  r.require(b.applicable && b.passed, "combined");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"gradient law at singleton fans", gradient_law},
      {"non-differentiability on the loci", non_differentiability},
      {"flat torus cut locus", torus_cut_locus},
      {"d_N ridge tips, probes and ray", construction_dN},
      {"combined field closure at (2,0)", combined_closure},
      {"critical-value cover bounds", sard_surrogate},
      {"two-point level sets", level_sets},
      {"local cut-locus equivalence", local_equivalence},
      {"1-Lipschitz fields", lipschitz_all},
      {"Randers asymmetry", asymmetry},
      {"limit inequalities", limit_inequalities},
      {"distance reconstruction", reconstruction},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome r;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(r);
    } catch (const std::exception& e) {
      r.require(false, std::string("exception: ") + e.what());
    }
    failed += !r.pass;
    std::printf("criterion %2d %s: %s  %s (%.1fs)\n", id, r.pass ? "PASS" : "FAIL", criteria[i].first, r.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
