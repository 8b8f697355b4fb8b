// SPDX-License-Identifier: Apache-2.0
// JSON scenario schema and artifact writers (JSON, CSV, PGM, SVG).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "singloc/clarke.hpp"
#include "singloc/scenario.hpp"

namespace singloc::io {

using json = nlohmann::ordered_json;

/// Non-finite values become the strings "inf" / "-inf" / "nan".
inline json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json pt(Point2 p) { return json::array({num(p.x), num(p.y)}); }

inline json pts(const std::vector<Point2>& ps) {
  json a = json::array();
  for (Point2 p : ps) a.push_back(pt(p));
  return a;
}

inline Point2 parse_pt(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::invalid_input, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// Parses "x,y".
inline Point2 parse_probe(const std::string& s) {
  std::istringstream in(s);
  double x = 0, y = 0;
  char comma = 0;
  if (!(in >> x >> comma >> y) || comma != ',') throw Error(ErrorCode::invalid_input, "probe must be \"x,y\"");
  in >> std::ws;
  if (!in.eof()) throw Error(ErrorCode::invalid_input, "probe must be \"x,y\"");
  return {x, y};
}

// --------------------------------------------------------------------------
// Scenario schema
//
// { "scenario": "<name>",
//   "config": { "K": 8, "theta": [...], "torus_point": [x, y], "wind": [wx, wy],
//               "a": 0.2, "b": 0.6, "stack_eps": [...], "grid": 256, "delta": 0,
//               "angres": 720, "cover": 0.01, "seed": 1 } }
// Every config key is optional.

inline json config_json(const ScenarioConfig& c) {
  json j;
  j["K"] = c.K;
  j["theta"] = c.theta;
  j["torus_point"] = pt(c.torus_point);
  j["wind"] = pt(c.wind);
  j["a"] = c.a;
  j["b"] = c.b;
  j["stack_eps"] = c.stack_eps;
  j["grid"] = c.grid_n;
  j["delta"] = c.delta;
  j["angres"] = c.angular_res;
  j["cover"] = c.cover;
  j["seed"] = c.seed;
  return j;
}

inline ScenarioConfig config_from_json(const json& j, ScenarioConfig c = {}) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_input, "config must be an object");
  static const std::vector<std::string> known{"K", "theta", "torus_point", "wind", "a", "b", "stack_eps",
                                              "grid", "delta", "angres", "cover", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw Error(ErrorCode::invalid_input, "unknown config key: " + it.key());
  try {
    if (j.contains("K")) c.K = j["K"].get<int>();
    if (j.contains("theta")) c.theta = j["theta"].get<std::vector<double>>();
    if (j.contains("torus_point")) c.torus_point = parse_pt(j["torus_point"]);
    if (j.contains("wind")) c.wind = parse_pt(j["wind"]);
    if (j.contains("a")) c.a = j["a"].get<double>();
    if (j.contains("b")) c.b = j["b"].get<double>();
    if (j.contains("stack_eps")) c.stack_eps = j["stack_eps"].get<std::vector<double>>();
    if (j.contains("grid")) c.grid_n = j["grid"].get<int>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("angres")) c.angular_res = j["angres"].get<int>();
    if (j.contains("cover")) c.cover = j["cover"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("bad config value: ") + e.what());
  }
  return c;
}

struct ScenarioFile {
  std::string name;
  ScenarioConfig config;
};

inline ScenarioFile scenario_file_from_json(const json& j) {
  if (!j.is_object() || !j.contains("scenario") || !j["scenario"].is_string())
    throw Error(ErrorCode::invalid_input, "scenario file needs a \"scenario\" name");
  ScenarioFile f;
  f.name = j["scenario"].get<std::string>();
  if (j.contains("config")) f.config = config_from_json(j["config"]);
  return f;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_input, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("invalid JSON: ") + e.what());
  }
  return scenario_file_from_json(j);
}

inline json tag_json(const OracleTag& t) {
  json j;
  j["basis"] = to_string(t.basis);
  if (!t.procedure.empty()) j["procedure"] = t.procedure;
  return j;
}

inline json window_json(const Window& w) {
  return {{"xmin", w.xmin}, {"xmax", w.xmax}, {"ymin", w.ymin}, {"ymax", w.ymax}, {"periodic", w.periodic}};
}

inline json oracle_json(const OracleData& o) {
  json j;
  json sp = json::array();
  for (const auto& p : o.singular_points) sp.push_back({{"point", pt(p.point)}, {"label", to_string(p.label)}, {"tag", tag_json(p.tag)}});
  j["singular_points"] = sp;
  json rays = json::array();
  for (const auto& r : o.rays)
    rays.push_back({{"origin", pt(r.origin)}, {"dir", pt(r.dir)}, {"length", num(r.length)}, {"tag", tag_json(r.tag)}});
  j["rays"] = rays;
  if (o.critical_values_known) {
    json cv = json::array();
    for (double v : o.critical_values) cv.push_back(num(v));
    j["critical_values"] = {{"values", cv}, {"tag", tag_json(o.critical_tag)}};
  }
  json lv = json::array();
  for (const auto& l : o.levels)
    lv.push_back({{"t", l.t}, {"components", l.components}, {"regular", l.regular}, {"tag", tag_json(l.tag)}});
  j["levels"] = lv;
  json vals = json::array();
  for (const auto& v : o.values) vals.push_back({{"point", pt(v.point)}, {"value", num(v.value)}, {"tag", tag_json(v.tag)}});
  j["values"] = vals;
  json ds = json::array();
  for (const auto& d : o.distances)
    ds.push_back({{"from", pt(d.from)}, {"to", pt(d.to)}, {"value", num(d.value)}, {"tag", tag_json(d.tag)}});
  j["distances"] = ds;
  j["upper_locus_samples"] = o.upper_locus.size();
  j["upper_locus_complete"] = o.upper_locus_complete;
  j["lower_locus_samples"] = o.lower_locus.size();
  if (o.reconstruction) {
    json r = {{"c", o.reconstruction->c}, {"tag", tag_json(o.reconstruction->tag)}};
    if (o.reconstruction->region) r["region"] = window_json(*o.reconstruction->region);
    j["reconstruction"] = r;
  }
  return j;
}

inline json scenario_json(const Scenario& s) {
  json j;
  j["scenario"] = s.name;
  j["description"] = s.description;
  j["metric"] = s.metric().name();
  j["field"] = s.field.description();
  j["window"] = window_json(s.window());
  j["window_note"] = s.window_note;
  j["range"] = {{"inf", num(s.field.range().inf)}, {"sup", num(s.field.range().sup)}};
  j["accuracy"] = num(s.field.accuracy());
  j["config"] = config_json(s.config);
  j["oracle"] = oracle_json(s.oracle);
  return j;
}

/// Metadata block embedded in every artifact.
inline json meta_json(const std::string& command, const Scenario& s, const json& extra = json::object()) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["scenario"] = s.name;
  j["config"] = config_json(s.config);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

// --------------------------------------------------------------------------
// Result objects

inline json point_class_json(const PointClass& pc) {
  json j;
  j["point"] = pt(pc.fan.point);
  j["label"] = to_string(pc.label);
  j["delta"] = num(pc.fan.delta);
  j["in_count"] = pc.in_count;
  j["out_count"] = pc.out_count;
  j["incoming"] = pts(pc.fan.incoming_dirs);
  j["outgoing"] = pts(pc.fan.outgoing_dirs);
  j["incoming_continuum"] = pc.fan.incoming_continuum;
  j["outgoing_continuum"] = pc.fan.outgoing_continuum;
  j["fast_path"] = pc.fast_path;
  j["window_exit"] = pc.window_exit;
  return j;
}

inline json graph_json(const SingularGraph& g) {
  json j;
  j["spacing"] = g.spacing;
  j["components"] = g.components;
  j["undetermined_fraction"] = g.undetermined_fraction;
  j["upper_nodes"] = g.upper_nodes.size();
  j["lower_nodes"] = g.lower_nodes.size();
  json vs = json::array();
  for (const auto& v : g.vertices)
    vs.push_back({{"pos", pt(v.pos)}, {"label", to_string(v.cls.label)}, {"degree", v.degree}, {"component", v.component},
                  {"in_count", v.cls.in_count}, {"out_count", v.cls.out_count}});
  j["vertices"] = vs;
  json es = json::array();
  for (const auto& e : g.edges)
    es.push_back({{"a", e.a}, {"b", e.b}, {"label", to_string(e.label)}, {"length", num(e.length)},
                  {"length_reverse", num(e.length_reverse)}, {"component", e.component}, {"polyline", pts(e.polyline)}});
  j["edges"] = es;
  return j;
}

inline json tree_json(const TreeReport& r) {
  return {{"balls_tested", r.balls_tested}, {"cycles_found", r.cycles_found},
          {"connectivity_failures", r.connectivity_failures}, {"max_distortion", num(r.max_distortion)},
          {"passed", r.passed}};
}

inline json critical_json(const CriticalValueEstimate& e) {
  json j;
  j["grid"] = e.grid_n;
  j["cover_width"] = e.cover_width;
  j["measure_upper_bound"] = e.measure_upper_bound;
  json vals = json::array();
  for (double v : e.values) vals.push_back(num(v));
  j["critical_values"] = vals;
  json ps = json::array();
  for (const auto& c : e.points) ps.push_back({{"point", pt(c.point)}, {"value", num(c.value)}, {"hull_distance", num(c.hull_distance)}});
  j["critical_points"] = ps;
  json h = json::array();
  for (const auto& s : e.history) h.push_back({{"cover_width", s.cover_width}, {"bound", s.bound}});
  j["refinement"] = h;
  j["undetermined"] = e.undetermined;
  j["window_exit"] = e.window_exit;
  return j;
}

inline json level_json(const LevelSet& ls) {
  json j;
  j["t"] = ls.value;
  j["grid"] = ls.grid_n;
  j["spacing"] = ls.spacing;
  j["max_residual"] = num(ls.max_residual);
  j["min_separation"] = num(ls.min_separation);
  j["disjoint"] = ls.disjoint;
  json cs = json::array();
  for (const auto& c : ls.components)
    cs.push_back({{"closed", c.closed}, {"regular", c.regular}, {"simple", c.simple}, {"points", c.polyline.size()},
                  {"polyline", pts(c.polyline)}});
  j["components"] = cs;
  return j;
}

inline json clarke_json(const ClarkeDifferential& cd, double tol) {
  json j;
  j["point"] = pt(cd.base);
  json gens = json::array();
  for (const auto& g : cd.generators) gens.push_back(pt(g.components));
  j["generators"] = gens;
  j["hull"] = pts(cd.hull);
  j["distance_to_zero"] = num(cd.distance_to_zero());
  j["tolerance"] = tol;
  j["critical"] = is_critical(cd, tol);
  return j;
}

inline json certificate_json(const FGeodesicCertificate& c) {
  json j;
  j["start"] = pt(c.segment.start);
  j["end"] = pt(c.segment.end());
  j["length"] = c.segment.length();
  j["residual"] = num(c.residual);
  j["tolerance"] = num(c.tolerance);
  j["certified"] = c.certified;
  j["minimality_gap"] = num(c.minimality_gap);
  if (c.stop) j["stop"] = to_string(*c.stop);
  return j;
}

inline json lipschitz_json(const LipschitzReport& r) {
  return {{"max_violation", num(r.max_violation)}, {"gradient_norm_max", num(r.gradient_norm_max)},
          {"gradient_samples", r.gradient_samples_used}, {"passed", r.passed}};
}

// --------------------------------------------------------------------------
// Writers

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_input, "cannot write " + path);
  out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Shortest round-trip decimal for doubles.
inline std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header comment lines carry the metadata block; columns follow.
inline std::string csv(const json& meta, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows) {
  std::ostringstream o;
  o << "# " << meta.dump() << "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) o << (k ? "," : "") << columns[k];
  o << "\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) o << (k ? "," : "") << fmt(r[k]);
    o << "\n";
  }
  return o.str();
}

/// Binary grayscale heatmap, row 0 at the top (largest y); the metadata goes in a comment.
inline std::string pgm(const json& meta, int nx, int ny, const std::vector<double>& values) {
  double lo = kInf, hi = -kInf;
  for (double v : values)
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) hi = lo + 1;
  std::ostringstream o;
  o << "P5\n# " << meta.dump() << "\n" << nx << " " << ny << "\n255\n";
  for (int j = ny - 1; j >= 0; --j)
    for (int i = 0; i < nx; ++i) {
      const double v = values[static_cast<std::size_t>(j) * nx + i];
      const int g = std::isfinite(v) ? static_cast<int>(std::lround(255.0 * (v - lo) / (hi - lo))) : 0;
      o << static_cast<char>(static_cast<unsigned char>(std::clamp(g, 0, 255)));
    }
  return o.str();
}

/// Minimal static SVG canvas in window coordinates (y up).
class Svg {
 public:
  Svg(const Window& w, int px = 640) : w_(w), px_(px) {}

  void polyline(const std::vector<Point2>& ps, const std::string& color, double width = 1.5) {
    if (ps.size() < 2) return;
    // Periodic windows: break where consecutive points wrap.
    std::vector<Point2> run{ps.front()};
    auto flush = [&] {
      if (run.size() < 2) return;
      body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\" points=\"";
      for (std::size_t k = 0; k < run.size(); ++k) body_ << (k ? " " : "") << X(run[k]) << "," << Y(run[k]);
      body_ << "\"/>\n";
    };
    for (std::size_t k = 1; k < ps.size(); ++k) {
      if (w_.periodic && norm(ps[k] - ps[k - 1]) > 0.5 * std::min(w_.width(), w_.height())) {
        flush();
        run.clear();
      }
      run.push_back(ps[k]);
    }
    flush();
  }
  void dot(Point2 p, const std::string& color, double r = 3) {
    body_ << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"" << r << "\" fill=\"" << color << "\"/>\n";
  }
  std::string str(const json& meta) const {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px_ << "\" height=\"" << px_ << "\" viewBox=\"0 0 " << px_
      << " " << px_ << "\">\n<!-- " << meta.dump() << " -->\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
    return o.str();
  }

 private:
  std::string X(Point2 p) const { return coord((p.x - w_.xmin) / w_.width() * px_); }
  std::string Y(Point2 p) const { return coord((w_.ymax - p.y) / w_.height() * px_); }
  static std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  Window w_;
  int px_;
  std::ostringstream body_;
};

}  // namespace singloc::io
