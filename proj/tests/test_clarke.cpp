// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "singloc/clarke.hpp"

using namespace singloc;

namespace {

const Window kBox{-4, 4, -4, 4, false};
const Window kTorus{0, 1, 0, 1, true};

ScalarField d_origin() { return dist_from_set(Metric::euclidean(), ClosedSet::point({0, 0}), kBox); }
ScalarField torus_field() { return dist_from_set(Metric::flat_torus(1, 1), ClosedSet::point({0, 0}), kTorus); }
ScalarField two_point() {
  return dist_from_set(Metric::euclidean(), ClosedSet::unite(ClosedSet::point({-1, 0}), ClosedSet::point({1, 0})),
                       Window{-3, 3, -3, 3, false});
}

ClarkeDifferential from_covectors(std::vector<Vec2> cs) {
  ClarkeDifferential cd;
  for (Vec2 c : cs) cd.generators.push_back({{0, 0}, c});
  cd.hull = detail::convex_hull(cs);
  return cd;
}

}  // namespace

TEST(Clarke, HullAndCriticality) {
  EXPECT_FALSE(is_critical(from_covectors({{1, 0}})));
  EXPECT_TRUE(is_critical(from_covectors({{1, 0}, {-1, 0}})));
  const auto right = from_covectors({{1, 0}, {0, 1}});
  EXPECT_FALSE(is_critical(right));
  EXPECT_NEAR(right.distance_to_zero(), std::sqrt(0.5), 1e-12);
  const auto tri = from_covectors({{1, 0}, {-0.5, 0.8}, {-0.5, -0.8}, {0.1, 0.1}});
  EXPECT_EQ(tri.hull.size(), 3u);
  EXPECT_EQ(tri.distance_to_zero(), 0.0);
  // Shrinking tol never makes a non-critical hull critical.
  for (double tol : {1e-1, 1e-2, 1e-3}) EXPECT_FALSE(is_critical(right, tol));
}

TEST(Clarke, SingletonFanMatchesDifferential) {
  const std::vector<ScalarField> fields{d_origin(), dist_from_set(Metric::randers_zermelo({0.5, 0}), ClosedSet::point({0, 0}), kBox)};
  for (const auto& f : fields) {
    const Point2 p{1.2, -0.7};
    const auto cd = generalized_differential(f, p);
    ASSERT_EQ(cd.generators.size(), 1u);
    const Vec2 df = fd_differential(f, p, 1e-5);
    EXPECT_NEAR(cd.generators[0].components.x, df.x, 1e-3);
    EXPECT_NEAR(cd.generators[0].components.y, df.y, 1e-3);
    EXPECT_NEAR(f.metric().dual_norm(p, cd.generators[0].components), 1.0, 1e-6);
  }
}

TEST(Clarke, TwoPointBisectorGenerators) {
  const auto f = two_point();
  const auto cd = generalized_differential(f, {0, 1});
  ASSERT_EQ(cd.generators.size(), 2u);
  const double r = std::sqrt(0.5);
  for (const auto& g : cd.generators) {
    EXPECT_NEAR(std::abs(g.components.x), r, 1e-4);
    EXPECT_NEAR(g.components.y, r, 1e-4);
  }
  EXPECT_FALSE(is_critical(cd));
  EXPECT_NEAR(cd.distance_to_zero(), r, 1e-4);
  EXPECT_TRUE(is_critical(generalized_differential(f, {0, 0})));
  EXPECT_THROW(generalized_differential(Metric::euclidean(), DirectionFan{}), Error);
}

TEST(Clarke, SardCoverEuclideanIsZero) {
  const auto e = estimate_critical_values(d_origin(), 48, 1e-2);
  EXPECT_TRUE(e.points.empty());
  EXPECT_EQ(e.measure_upper_bound, 0.0);
}

TEST(Clarke, SardCoverTwoPoint) {
  const auto f = two_point();
  for (double w : {1e-2, 1e-3, 1e-4}) {
    const auto e = estimate_critical_values(f, 48, w);
    ASSERT_FALSE(e.values.empty());
    // Only the midpoint is critical, with value half the separation.
    for (double v : e.values) EXPECT_NEAR(v, 1.0, 1e-9);
    EXPECT_LE(e.measure_upper_bound, 2 * w);
    for (std::size_t k = 1; k < e.history.size(); ++k) EXPECT_LE(e.history[k].bound, e.history[k - 1].bound + 1e-9);
  }
}

TEST(Clarke, SardCoverTorus) {
  const double w = 1e-3;
  const auto e = estimate_critical_values(torus_field(), 64, w);
  // Lattice oracle: (1/2, 0) and (0, 1/2) at 1/2, the cross vertex at sqrt(2)/2.
  ASSERT_EQ(e.points.size(), 3u);
  EXPECT_NEAR(e.values[0], 0.5, 1e-9);
  EXPECT_NEAR(e.values[1], 0.5, 1e-9);
  EXPECT_NEAR(e.values[2], std::sqrt(0.5), 1e-9);
  EXPECT_LE(e.measure_upper_bound, 3 * w);
}

TEST(Clarke, EdgeCoversOnTorusGraph) {
  const auto f = torus_field();
  const auto g = extract_singular_locus(f, {64, {}});
  const auto covers = edge_critical_covers(f, g, 1e-3);
  ASSERT_EQ(covers.size(), g.edges.size());
  for (const auto& c : covers) {
    EXPECT_LE(c.measure_upper_bound, 3e-3);
    for (double v : c.values) EXPECT_TRUE(std::abs(v - 0.5) < 1e-9 || std::abs(v - std::sqrt(0.5)) < 1e-9) << v;
  }
}

TEST(Clarke, TwoPointLevelSets) {
  const auto f = two_point();
  const auto a = extract_level_set(f, 96, 0.5);
  ASSERT_EQ(a.components.size(), 2u);
  EXPECT_EQ(a.regular_count(), 2u);
  for (const auto& c : a.components) {
    EXPECT_TRUE(c.closed);
    EXPECT_TRUE(c.simple);
  }
  EXPECT_TRUE(a.disjoint);
  EXPECT_NEAR(a.min_separation, 1.0, 2 * a.spacing);
  EXPECT_LE(a.max_residual, 2 * a.spacing);
  const auto b = extract_level_set(f, 96, 1.5);
  ASSERT_EQ(b.components.size(), 1u);
  EXPECT_TRUE(b.components[0].regular);
  EXPECT_TRUE(b.components[0].simple);
  const auto c = extract_level_set(f, 96, 1.0);
  bool flagged = false;
  for (const auto& comp : c.components) {
    double near = kInf;
    for (Point2 q : comp.polyline) near = std::min(near, norm(q));
    if (near < 2 * c.spacing) {
      flagged = flagged || !comp.regular;
      EXPECT_FALSE(comp.regular);
    }
  }
  EXPECT_TRUE(flagged);
  EXPECT_THROW(extract_level_set(f, 96, 0.0), Error);
}

TEST(Clarke, TorusLevelSetWraps) {
  // The circle of radius 0.3 about the source crosses the window seams.
  const auto ls = extract_level_set(torus_field(), 64, 0.3);
  ASSERT_EQ(ls.components.size(), 1u);
  EXPECT_TRUE(ls.components[0].closed);
  EXPECT_TRUE(ls.components[0].regular);
  EXPECT_LE(ls.max_residual, 2 * ls.spacing);
}

TEST(Clarke, ChainRuleOnBisector) {
  const auto f = two_point();
  const auto c = [](double s) { return Point2{0, s}; };
  for (double s : {0.3, 0.7, 1.5}) {
    const auto r = chain_rule_check(f, c, s);
    EXPECT_NEAR(r.derivative, s / std::sqrt(1 + s * s), 1e-6);
    EXPECT_EQ(r.covector_values.size(), 2u);
    EXPECT_LE(r.residual, 1e-3);
  }
  const auto z = chain_rule_check(f, c, 0.0);
  EXPECT_NEAR(z.derivative, 0.0, 1e-6);
  EXPECT_LE(z.residual, 1e-3);
}

TEST(Clarke, ChainRuleOnTorusCross) {
  const auto curve = arclength_curve({{0.5, 0.05}, {0.5, 0.45}});
  const auto r = chain_rule_check(torus_field(), curve, 0.2);
  EXPECT_EQ(r.covector_values.size(), 2u);
  EXPECT_LE(r.residual, 1e-3);
  // d/ds sqrt(1/4 + s^2) at s = 0.25
  EXPECT_NEAR(r.derivative, 0.25 / std::sqrt(0.3125), 1e-6);
}
