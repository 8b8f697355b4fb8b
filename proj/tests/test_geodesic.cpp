// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "singloc/geodesic.hpp"

using namespace singloc;

namespace {

Metric half_plane() {
  return Metric::riemannian([](Point2 x) { return Mat2{1 / (x.y * x.y), 0, 0, 1 / (x.y * x.y)}; }, "half-plane");
}

double half_plane_distance(Point2 p, Point2 q) {
  const Vec2 d = q - p;
  return std::acosh(1 + dot(d, d) / (2 * p.y * q.y));
}

}  // namespace

TEST(Geodesic, StraightLinesForRanders) {
  const Metric m = Metric::randers_zermelo({0.5, 0});
  const Vec2 u = m.normalize({0, 0}, {1, 0});
  const auto seg = integrate_geodesic(m, {0, 0}, u, 2.0 / 3.0, 1e-2);
  EXPECT_NEAR(seg.end().x, 1.0, 1e-12);
  EXPECT_NEAR(seg.end().y, 0.0, 1e-12);
  EXPECT_LT(unit_speed_defect(m, seg), 1e-12);
}

TEST(Geodesic, RejectsNonUnitDirection) {
  EXPECT_THROW(integrate_geodesic(Metric::euclidean(), {0, 0}, {2, 0}, 1, 0.1), Error);
  EXPECT_THROW(integrate_geodesic(Metric::euclidean(), {0, 0}, {1, 0}, -1, 0.1), Error);
}

TEST(Geodesic, HalfPlaneGeodesicIsSemicircle) {
  const Metric m = half_plane();
  const Point2 p{0, 1};
  const Vec2 u = m.normalize(p, {1, 1});  // circle centered at (1, 0) of radius sqrt(2)
  const auto seg = integrate_geodesic(m, p, u, 1.5, 1e-3);
  for (const auto& s : seg.samples) EXPECT_NEAR(norm(s.pos - Vec2{1, 0}), std::sqrt(2.0), 1e-8);
  EXPECT_LT(unit_speed_defect(m, seg), 1e-8);
  // Unit speed: length equals distance between endpoints for a minimizing arc.
  EXPECT_NEAR(half_plane_distance(p, seg.end()), 1.5, 1e-8);
}

TEST(Geodesic, PointBeforeInvertsForwardFlow) {
  const Metric m = half_plane();
  const Point2 p{0, 1};
  const Vec2 u = m.normalize(p, {1, 0.3});
  const auto [q, v] = geodesic_state(m, p, u, 0.8);
  const Point2 back = geodesic_point_before(m, q, v, 0.8);
  EXPECT_NEAR(back.x, p.x, 1e-8);
  EXPECT_NEAR(back.y, p.y, 1e-8);
  const Metric r = Metric::randers_zermelo({0.5, 0});
  EXPECT_NEAR(norm(geodesic_point_before(r, {1, 1}, r.normalize({1, 1}, {1, 0}), 2.0 / 3.0) - Vec2{0, 1}), 0, 1e-12);
}

TEST(Geodesic, WindowTruncation) {
  const Window w{-1, 1, -1, 1, false};
  const auto seg = integrate_geodesic(Metric::euclidean(), {0, 0}, {1, 0}, 3, 0.01, w);
  EXPECT_TRUE(seg.truncated);
  EXPECT_LE(seg.end().x, 1.0);
  EXPECT_GT(seg.end().x, 0.98);
}

TEST(Geodesic, ShootingMatchesHalfPlaneFormula) {
  const Metric m = half_plane();
  DistanceOptions o;
  o.starts = 8;
  for (auto [p, q] : {std::pair<Point2, Point2>{{0, 1}, {1, 1}}, {{-0.5, 0.5}, {0.7, 2.0}}, {{0, 1}, {0, 3}}}) {
    const auto r = distance(m, p, q, o);
    EXPECT_EQ(r.method, DistanceMethod::shooting);
    EXPECT_FALSE(r.approximate);
    EXPECT_NEAR(r.value, half_plane_distance(p, q), 1e-6);
    ASSERT_EQ(r.minimizers.size(), 1u);
    EXPECT_NEAR(norm(r.minimizers[0].end() - q), 0, 1e-6);
  }
}

TEST(Geodesic, TorusMinimalSegments) {
  const Metric t = Metric::flat_torus(1, 1);
  EXPECT_EQ(minimal_segments(t, {0, 0}, {0.5, 0.5}).size(), 4u);
  EXPECT_EQ(minimal_segments(t, {0, 0}, {0.5, 0.2}).size(), 2u);
  EXPECT_EQ(minimal_segments(t, {0, 0}, {0.3, 0.2}).size(), 1u);
  const auto r = distance(t, {0.1, 0.1}, {0.9, 0.9});
  EXPECT_NEAR(r.value, std::sqrt(0.08), 1e-14);
  EXPECT_THROW(minimal_segments(t, {0, 0}, {0, 0}), Error);
}

TEST(Geodesic, FirstVariationOfEuclideanSegment) {
  // Moving the endpoint of a unit segment by U changes length at rate <γ', U>.
  const Metric m = Metric::euclidean();
  VariationProbe probe;
  probe.base = integrate_geodesic(m, {0, 0}, {1, 0}, 1.0, 0.25);
  probe.field.assign(probe.base.samples.size(), Vec2{0, 0});
  probe.field.back() = {0.3, 0.7};
  EXPECT_NEAR(first_variation(m, probe), 0.3, 1e-14);
  probe.field.front() = {0.1, 0};
  EXPECT_NEAR(first_variation(m, probe), 0.2, 1e-14);
}

TEST(Geodesic, FirstVariationMatchesFiniteDifferenceForRanders) {
  const Metric m = Metric::randers_zermelo({0.5, 0.2});
  const Point2 p{0, 0}, q{1, 0.5};
  const Vec2 U{-0.2, 0.4};
  const double L = m.analytic_distance(p, q);
  VariationProbe probe;
  probe.base = integrate_geodesic(m, p, m.normalize(p, q - p), L, L / 4);
  probe.field.assign(probe.base.samples.size(), Vec2{0, 0});
  probe.field.back() = U;
  const double e = 1e-6;
  const double fd = (m.analytic_distance(p, q + e * U) - m.analytic_distance(p, q - e * U)) / (2 * e);
  EXPECT_NEAR(first_variation(m, probe), fd, 1e-8);
}

TEST(Geodesic, SegmentCsvHasHeader) {
  std::ostringstream os;
  write_segment_csv(os, integrate_geodesic(Metric::euclidean(), {0, 0}, {0, 1}, 1, 0.5));
  EXPECT_EQ(os.str().substr(0, 14), "t,x,y,vx,vy\n0,");
}
