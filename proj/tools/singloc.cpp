// SPDX-License-Identifier: Apache-2.0
// singloc: command-line front end for scenarios, singular loci, critical values and level sets.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "singloc/singloc.hpp"

namespace {

using namespace singloc;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct Flags {
  std::string scenario;
  std::string scenario_file;
  std::optional<int> grid;
  std::optional<double> delta;
  std::optional<int> angres;
  std::optional<double> cover;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string probe;
  std::optional<double> value;
};

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--scenario", f.scenario, "shipped scenario name (see `scenario list`)");
  c->add_option("--scenario-file", f.scenario_file, "JSON scenario file");
  c->add_option("--grid", f.grid, "grid cells per side")->check(CLI::PositiveNumber);
  c->add_option("--delta", f.delta, "probe length for classification (0: grid spacing)");
  c->add_option("--angres", f.angres, "directions in a fan")->check(CLI::PositiveNumber);
  c->add_option("--cover", f.cover, "critical-value cover width");
  c->add_option("--seed", f.seed, "random seed");
  c->add_option("--out", f.out, "output directory");
}

Scenario load(const Flags& f) {
  if (f.scenario.empty() == f.scenario_file.empty())
    throw Error(ErrorCode::invalid_input, "give exactly one of --scenario or --scenario-file");
  io::ScenarioFile sf;
  if (!f.scenario_file.empty()) {
    sf = io::load_scenario_file(f.scenario_file);
  } else {
    sf.name = f.scenario;
  }
  ScenarioConfig& c = sf.config;
  if (f.grid) c.grid_n = *f.grid;
  if (f.delta) c.delta = *f.delta;
  if (f.angres) c.angular_res = *f.angres;
  if (f.cover) c.cover = *f.cover;
  if (f.seed) c.seed = *f.seed;
  return make_scenario(sf.name, c);
}

/// File name only, so metadata does not depend on the output directory.
std::string base(const std::string& path) { return std::filesystem::path(path).filename().string(); }

std::string out_path(const Flags& f, const Scenario& s, const std::string& cmd, const std::string& ext) {
  std::filesystem::create_directories(f.out);
  return (std::filesystem::path(f.out) / (s.name + "_" + cmd + "." + ext)).string();
}

/// Decimal with at least one fractional digit ("2.0", "0.6666666666666666").
std::string show(double v) {
  std::string s = io::fmt(v);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

ClassifyOptions classify_options(const ScenarioConfig& c) {
  ClassifyOptions co;
  co.delta = c.delta;
  co.angular_res = c.angular_res;
  return co;
}

FanOptions fan_options(const ScenarioConfig& c) {
  FanOptions fo;
  fo.delta = c.delta;
  fo.angular_res = c.angular_res;
  return fo;
}

// --------------------------------------------------------------------------

int cmd_distmap(const Flags& fl) {
  const Scenario s = load(fl);
  const ScalarField& f = s.field;
  if (!fl.probe.empty()) {
    const Point2 p = io::parse_probe(fl.probe);
    const double v = f(s.window().wrap(p));
    std::cout << show(v) << "\n";
    return std::isfinite(v) ? kExitOk : kExitNumeric;
  }
  const GridField g = sample_grid(s.window(), s.config.grid_n, [&](Point2 p) { return f(p); });
  std::vector<std::vector<double>> rows;
  rows.reserve(g.size());
  std::size_t nonfinite = 0;
  double lo = kInf, hi = -kInf;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const Point2 p = g.node(i, j);
      const double v = g.at(i, j);
      if (!std::isfinite(v)) {
        ++nonfinite;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      rows.push_back({static_cast<double>(i), static_cast<double>(j), p.x, p.y, v});
    }
  const bool partial = nonfinite > 0;
  const json meta = io::meta_json("distmap", s, {{"partial", partial}});
  const std::string csv = out_path(fl, s, "distmap", "csv"), pgm = out_path(fl, s, "distmap", "pgm"),
                    js = out_path(fl, s, "distmap", "json");
  io::write_text(csv, io::csv(meta, {"i", "j", "x", "y", "f"}, rows));
  io::write_text(pgm, io::pgm(meta, g.nx(), g.ny(), g.values()));
  json j = meta;
  j["grid"] = {{"nx", g.nx()}, {"ny", g.ny()}, {"spacing", g.spacing()}, {"window", io::window_json(s.window())}};
  j["min"] = io::num(lo);
  j["max"] = io::num(hi);
  j["nonfinite_nodes"] = nonfinite;
  j["files"] = {base(csv), base(pgm)};
  io::write_json(js, j);
  std::cout << csv << "\n" << pgm << "\n" << js << "\n";
  return partial ? kExitNumeric : kExitOk;
}

int cmd_singular(const Flags& fl) {
  const Scenario s = load(fl);
  ExtractOptions eo;
  eo.grid_n = s.config.grid_n;
  eo.classify = classify_options(s.config);
  const SingularGraph g = extract_singular_locus(s.field, eo);
  std::optional<TreeReport> tree;
  const double r = local_tree_radius(g.spacing);
  if (!g.edges.empty()) tree = verify_local_tree(g, r, 50, s.config.seed);

  const json meta = io::meta_json("singular", s);
  json j = meta;
  j["graph"] = io::graph_json(g);
  if (tree) {
    j["tree"] = io::tree_json(*tree);
    j["tree"]["radius"] = r;
  } else {
    j["tree"] = {{"passed", true}, {"note", "no edges"}};
  }
  const std::string js = out_path(fl, s, "singular", "json"), svg = out_path(fl, s, "singular", "svg");
  io::write_json(js, j);

  io::Svg pic(s.window());
  for (Point2 q : g.upper_nodes) pic.dot(q, "#f4a6a6", 1.0);
  for (Point2 q : g.lower_nodes) pic.dot(q, "#a6c8f4", 1.0);
  for (const auto& e : g.edges) pic.polyline(e.polyline, e.label == SingularLabel::upper_singular ? "#c00000" : "#0040c0");
  for (const auto& v : g.vertices) pic.dot(v.pos, v.cls.label == SingularLabel::upper_singular ? "#c00000" : "#0040c0", 3.0);
  io::write_text(svg, pic.str(meta));

  std::size_t up = 0, low = 0;
  for (const auto& v : g.vertices) (v.cls.label == SingularLabel::upper_singular ? up : low) += 1;
  std::cout << "vertices " << g.vertices.size() << " (upper " << up << ", lower " << low << "), edges " << g.edges.size()
            << ", undetermined " << g.undetermined_fraction << "\n";
  std::cout << "local tree " << (!tree || tree->passed ? "pass" : "FAIL") << "\n" << js << "\n" << svg << "\n";
  return !tree || tree->passed ? kExitOk : kExitVerify;
}

int cmd_sard(const Flags& fl) {
  const Scenario s = load(fl);
  CriticalOptions co;
  co.classify = classify_options(s.config);
  co.classify.delta = 0.0;
  const auto est = estimate_critical_values(s.field, s.config.grid_n, s.config.cover, co);
  json j = io::meta_json("sard", s);
  j["estimate"] = io::critical_json(est);
  const std::string js = out_path(fl, s, "sard", "json");
  io::write_json(js, j);
  std::cout << "critical values " << est.values.size() << ", cover bound " << show(est.measure_upper_bound) << "\n";
  std::cout << "cover_width,bound\n";
  for (const auto& h : est.history) std::cout << io::fmt(h.cover_width) << "," << io::fmt(h.bound) << "\n";
  std::cout << js << "\n";
  return kExitOk;
}

int cmd_verify(const Flags& fl) {
  const Scenario s = load(fl);
  const VerifyReport r = run_verification(s);
  json j = io::meta_json("verify", s);
  j["report"] = verify_json(r);
  const std::string js = out_path(fl, s, "verify", "json");
  io::write_json(js, j);
  for (const auto& c : r.checks) std::printf("%-22s %s\n", c.name.c_str(), to_string(c.status));
  std::cout << (r.passed() ? "PASS" : "FAIL") << "\n" << js << "\n";
  return r.passed() ? kExitOk : kExitVerify;
}

int cmd_trace(const Flags& fl) {
  const Scenario s = load(fl);
  if (fl.probe.empty()) throw Error(ErrorCode::invalid_input, "trace needs --probe \"x,y\"");
  const ScalarField& f = s.field;
  const Point2 p = s.window().wrap(io::parse_probe(fl.probe));
  TraceOptions to;
  to.fan = fan_options(s.config);
  ExtensionOptions xo;
  xo.trace = to;
  const auto found = maximal_f_geodesic_through(f, p, xo);
  const json meta = io::meta_json("trace", s, {{"probe", io::pt(p)}});
  json j = meta;
  j["classification"] = io::point_class_json(classify_point(f, p, classify_options(s.config)));
  if (!found) {
    j["certified"] = false;
    io::write_json(out_path(fl, s, "trace", "json"), j);
    std::cout << "no certified f-geodesic through the probe\n";
    return kExitNumeric;
  }
  const MaximalFGeodesic& mx = *found;
  j["certified"] = mx.certificate.certified;
  j["certificate"] = io::certificate_json(mx.certificate);
  j["backward_end"] = {{"point", io::pt(mx.backward_end.point)}, {"reason", to_string(mx.backward_end.reason)},
                       {"extension_blocked", mx.backward_end.extension_blocked}};
  j["forward_end"] = {{"point", io::pt(mx.forward_end.point)}, {"reason", to_string(mx.forward_end.reason)},
                      {"extension_blocked", mx.forward_end.extension_blocked}};
  j["junction_jump"] = io::num(mx.junction_jump);

  std::vector<std::vector<double>> rows;
  std::vector<Point2> path;
  for (const auto& smp : mx.certificate.segment.samples) {
    const Point2 q = s.window().wrap(smp.pos);
    rows.push_back({smp.t, q.x, q.y, f(q)});
    path.push_back(smp.pos);
  }
  const std::string csv = out_path(fl, s, "trace", "csv"), svg = out_path(fl, s, "trace", "svg"),
                    js = out_path(fl, s, "trace", "json");
  io::write_text(csv, io::csv(meta, {"t", "x", "y", "f"}, rows));
  io::Svg pic(s.window());
  pic.polyline(path, "#206020", 2.0);
  pic.dot(p, "black", 3.0);
  io::write_text(svg, pic.str(meta));
  j["files"] = {base(csv), base(svg)};
  io::write_json(js, j);
  std::cout << "from " << io::pt(mx.backward_end.point).dump() << " (" << to_string(mx.backward_end.reason) << ") to "
            << io::pt(mx.forward_end.point).dump() << " (" << to_string(mx.forward_end.reason) << "), length "
            << show(mx.certificate.segment.length()) << "\n"
            << csv << "\n" << svg << "\n" << js << "\n";
  return mx.certificate.certified ? kExitOk : kExitNumeric;
}

int cmd_clarke(const Flags& fl) {
  const Scenario s = load(fl);
  if (fl.probe.empty()) throw Error(ErrorCode::invalid_input, "clarke needs --probe \"x,y\"");
  const Point2 p = s.window().wrap(io::parse_probe(fl.probe));
  const auto cd = generalized_differential(s.field, p, fan_options(s.config));
  json j = io::meta_json("clarke", s, {{"probe", io::pt(p)}});
  j["differential"] = io::clarke_json(cd, 1e-3);
  const std::string js = out_path(fl, s, "clarke", "json");
  io::write_json(js, j);
  std::cout << "generators " << cd.generators.size() << ", distance to zero " << show(cd.distance_to_zero()) << ", "
            << (is_critical(cd) ? "critical" : "not critical") << "\n"
            << js << "\n";
  return kExitOk;
}

int cmd_levelset(const Flags& fl) {
  const Scenario s = load(fl);
  if (!fl.value) throw Error(ErrorCode::invalid_input, "levelset needs --value <t>");
  LevelSetOptions lo;
  lo.critical.classify = classify_options(s.config);
  lo.critical.classify.delta = 0.0;
  const LevelSet ls = extract_level_set(s.field, s.config.grid_n, *fl.value, lo);
  const json meta = io::meta_json("levelset", s, {{"value", *fl.value}});
  json j = meta;
  j["level_set"] = io::level_json(ls);
  std::vector<std::vector<double>> rows;
  io::Svg pic(s.window());
  for (std::size_t c = 0; c < ls.components.size(); ++c) {
    const auto& comp = ls.components[c];
    for (std::size_t k = 0; k < comp.polyline.size(); ++k)
      rows.push_back({static_cast<double>(c), static_cast<double>(k), comp.polyline[k].x, comp.polyline[k].y});
    auto line = comp.polyline;
    if (comp.closed && !line.empty()) line.push_back(line.front());
    pic.polyline(line, comp.regular ? "#204080" : "#c00000", 1.5);
  }
  const std::string csv = out_path(fl, s, "levelset", "csv"), svg = out_path(fl, s, "levelset", "svg"),
                    js = out_path(fl, s, "levelset", "json");
  io::write_text(csv, io::csv(meta, {"component", "k", "x", "y"}, rows));
  io::write_text(svg, pic.str(meta));
  j["files"] = {base(csv), base(svg)};
  io::write_json(js, j);
  std::cout << "components " << ls.components.size() << " (regular " << ls.regular_count() << "), disjoint "
            << (ls.disjoint ? "yes" : "no") << "\n"
            << csv << "\n" << svg << "\n" << js << "\n";
  return kExitOk;
}

int cmd_scenario_list() {
  for (const auto& n : scenario_names()) std::cout << n << "\t" << make_scenario(n).description << "\n";
  return kExitOk;
}

int cmd_scenario_dump(const Flags& fl) {
  std::cout << io::scenario_json(load(fl)).dump(2) << "\n";
  return kExitOk;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::invalid_input:
    case ErrorCode::domain_error:
    case ErrorCode::not_applicable: return kExitUsage;
    default: return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singloc: singular loci of almost distance functions on Finsler surfaces"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Flags fl;
  std::function<int()> run;

  auto* distmap = app.add_subcommand("distmap", "field grid as CSV, PGM heatmap and JSON metadata");
  add_common(distmap, fl);
  distmap->add_option("--probe", fl.probe, "print f at \"x,y\" instead of writing files");
  distmap->callback([&] { run = [&] { return cmd_distmap(fl); }; });

  auto* singular = app.add_subcommand("singular", "singular-locus graph as JSON and SVG, with the local-tree report");
  add_common(singular, fl);
  singular->callback([&] { run = [&] { return cmd_singular(fl); }; });

  auto* sard = app.add_subcommand("sard", "critical-value cover estimate with its refinement table");
  add_common(sard, fl);
  sard->callback([&] { run = [&] { return cmd_sard(fl); }; });

  auto* verify = app.add_subcommand("verify", "run every invariant check against the scenario oracles");
  add_common(verify, fl);
  verify->callback([&] { run = [&] { return cmd_verify(fl); }; });

  auto* trace = app.add_subcommand("trace", "maximal f-geodesic through a probe point (CSV, SVG, JSON)");
  add_common(trace, fl);
  trace->add_option("--probe", fl.probe, "point \"x,y\"")->required();
  trace->callback([&] { run = [&] { return cmd_trace(fl); }; });

  auto* clarke = app.add_subcommand("clarke", "generalized differential at a probe point");
  add_common(clarke, fl);
  clarke->add_option("--probe", fl.probe, "point \"x,y\"")->required();
  clarke->callback([&] { run = [&] { return cmd_clarke(fl); }; });

  auto* levelset = app.add_subcommand("levelset", "level set f = t as CSV, SVG and JSON");
  add_common(levelset, fl);
  levelset->add_option("--value", fl.value, "level t")->required();
  levelset->callback([&] { run = [&] { return cmd_levelset(fl); }; });

  auto* scenario = app.add_subcommand("scenario", "list or dump shipped scenarios");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "shipped scenario names");
  list->callback([&] { run = [] { return cmd_scenario_list(); }; });
  auto* dump = scenario->add_subcommand("dump", "scenario JSON (config, window, oracles)");
  add_common(dump, fl);
  dump->callback([&] { run = [&] { return cmd_scenario_dump(fl); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  try {
    return run ? run() : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
