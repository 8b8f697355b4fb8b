// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "singloc/io.hpp"

using namespace singloc;
using io::json;

TEST(Io, ConfigRoundTrip) {
  ScenarioConfig c;
  c.K = 5;
  c.theta = {1.0, 0.5, 0.25, 0.125, 0.0625};
  c.wind = {0.25, -0.1};
  c.grid_n = 77;
  c.delta = 0.01;
  c.seed = 42;
  const json j = io::config_json(c);
  const ScenarioConfig d = io::config_from_json(j);
  EXPECT_EQ(d.K, 5);
  EXPECT_EQ(d.theta, c.theta);
  EXPECT_DOUBLE_EQ(d.wind.y, -0.1);
  EXPECT_EQ(d.grid_n, 77);
  EXPECT_EQ(d.seed, 42u);
  EXPECT_EQ(io::config_json(d).dump(), j.dump());
}

TEST(Io, RejectsBadInput) {
  EXPECT_THROW(io::config_from_json(json{{"bogus", 1}}), Error);
  EXPECT_THROW(io::config_from_json(json{{"grid", "many"}}), Error);
  EXPECT_THROW(io::scenario_file_from_json(json{{"config", json::object()}}), Error);
  EXPECT_THROW(io::parse_probe("3"), Error);
  EXPECT_THROW(io::parse_probe("3,4,5"), Error);
  const Point2 p = io::parse_probe("3,-0.5");
  EXPECT_DOUBLE_EQ(p.x, 3);
  EXPECT_DOUBLE_EQ(p.y, -0.5);
}

TEST(Io, ScenarioFileParses) {
  const json j = json::parse(R"({"scenario": "flat_torus", "config": {"grid": 64, "torus_point": [0.1, 0.2]}})");
  const auto f = io::scenario_file_from_json(j);
  EXPECT_EQ(f.name, "flat_torus");
  EXPECT_EQ(f.config.grid_n, 64);
  EXPECT_DOUBLE_EQ(f.config.torus_point.y, 0.2);
  EXPECT_EQ(f.config.K, ScenarioConfig{}.K);
}

TEST(Io, ScenarioDumpIsDeterministicAndCarriesVersion) {
  const Scenario s = make_scenario("two_point_dN", {});
  const std::string a = io::scenario_json(s).dump();
  const std::string b = io::scenario_json(make_scenario("two_point_dN", {})).dump();
  EXPECT_EQ(a, b);
  const json m = io::meta_json("distmap", s);
  EXPECT_EQ(m["version"], kVersion);
  EXPECT_TRUE(m["config"].contains("grid"));
}

TEST(Io, NonFiniteNumbersAreStrings) {
  EXPECT_EQ(io::num(kInf).dump(), "\"inf\"");
  EXPECT_EQ(io::num(-kInf).dump(), "\"-inf\"");
  EXPECT_EQ(io::num(0.5).dump(), "0.5");
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
}

TEST(Io, CsvPgmSvgLayout) {
  const Scenario s = make_scenario("euclidean_point", {});
  const json m = io::meta_json("distmap", s);
  const std::string c = io::csv(m, {"x", "y", "f"}, {{0, 0, 0}, {1, 0, 1}});
  EXPECT_EQ(c.rfind("# {", 0), 0u);
  EXPECT_NE(c.find("\nx,y,f\n0,0,0\n1,0,1\n"), std::string::npos);

  const std::string p = io::pgm(m, 2, 2, {0.0, 1.0, 2.0, 3.0});
  EXPECT_EQ(p.rfind("P5\n# ", 0), 0u);
  const std::string tail = p.substr(p.size() - 4);
  // Top row first: y index 1 holds values 2, 3.
  EXPECT_EQ(static_cast<unsigned char>(tail[0]), 170);
  EXPECT_EQ(static_cast<unsigned char>(tail[1]), 255);
  EXPECT_EQ(static_cast<unsigned char>(tail[2]), 0);
  EXPECT_EQ(static_cast<unsigned char>(tail[3]), 85);

  io::Svg svg(Window{0, 1, 0, 1, true}, 100);
  svg.polyline({{0.1, 0.5}, {0.4, 0.5}}, "red");
  svg.polyline({{0.95, 0.5}, {0.05, 0.5}}, "blue");  // wraps, nothing drawn
  svg.dot({0.5, 0.5}, "black");
  const std::string out = svg.str(m);
  EXPECT_NE(out.find("points=\"10.00,50.00 40.00,50.00\""), std::string::npos);
  EXPECT_EQ(out.find("blue"), std::string::npos);
  EXPECT_NE(out.find("\"version\":\"" + std::string(kVersion) + "\""), std::string::npos);
}

TEST(Io, ResultSerializers) {
  const Scenario s = make_scenario("two_point_dN", {});
  const auto pc = classify_point(s.field, {0.0, 0.5}, {});
  const json j = io::point_class_json(pc);
  EXPECT_EQ(j["label"], "upper-singular");
  EXPECT_EQ(j["in_count"].get<int>(), 2);
  const auto cd = generalized_differential(s.field, {0.0, 0.5}, {});
  const json k = io::clarke_json(cd, 1e-3);
  EXPECT_EQ(k["generators"].size(), 2u);
  EXPECT_FALSE(k["critical"].get<bool>());
}
