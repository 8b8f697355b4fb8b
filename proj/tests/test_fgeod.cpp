// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "singloc/fgeod.hpp"

using namespace singloc;

namespace {

const Window kBox{-4, 4, -4, 4, false};
const Window kTorus{0, 1, 0, 1, true};

ScalarField d_origin() { return dist_from_set(Metric::euclidean(), ClosedSet::point({0, 0}), kBox); }

ScalarField torus_field() { return dist_from_set(Metric::flat_torus(1, 1), ClosedSet::point({0, 0}), kTorus); }

GeodesicSegment chord(Point2 a, Point2 b, int n = 64) {
  return integrate_geodesic(Metric::euclidean(), a, (b - a) / norm(b - a), norm(b - a), norm(b - a) / n);
}

}  // namespace

TEST(FGeod, RadialSegmentCertifies) {
  const auto c = certify_f_geodesic(d_origin(), chord({1, 0}, {3, 0}));
  EXPECT_TRUE(c.certified);
  EXPECT_LT(c.residual, 1e-14);
  EXPECT_LT(c.minimality_gap, 1e-12);
  EXPECT_FALSE(c.canonical);  // parameter starts at 0 while f = 1
}

TEST(FGeod, ChordAcrossLevelSetFails) {
  const auto c = certify_f_geodesic(d_origin(), chord({1, 0}, {0, 1}));
  EXPECT_FALSE(c.certified);
  EXPECT_GT(c.residual, 0.5);
}

TEST(FGeod, CanonicalShiftAndIdempotence) {
  const auto f = d_origin();
  const auto c = canonical_reparametrize(f, certify_f_geodesic(f, chord({2, 0}, {3, 0})));
  EXPECT_NEAR(c.segment.t0, 2.0, 1e-12);
  EXPECT_NEAR(c.segment.t1, 3.0, 1e-12);
  EXPECT_TRUE(c.canonical);
  const auto again = canonical_reparametrize(f, c);
  EXPECT_EQ(again.segment.t0, c.segment.t0);
  EXPECT_EQ(again.segment.t1, c.segment.t1);
  const auto z = canonical_reparametrize(f, certify_f_geodesic(f, chord({0, 0}, {0, 1})));
  EXPECT_EQ(z.segment.t0, 0.0);
  EXPECT_THROW(canonical_reparametrize(f, certify_f_geodesic(f, chord({1, 0}, {0, 1}))), Error);
}

TEST(FGeod, FanAtGenericPoint) {
  const Point2 q{1.2, -0.7};
  const auto fan = direction_fan(d_origin(), q);
  ASSERT_EQ(fan.incoming_dirs.size(), 1u);
  ASSERT_EQ(fan.outgoing_dirs.size(), 1u);
  const Vec2 radial = q / norm(q);
  EXPECT_NEAR(norm(fan.incoming_dirs[0] - radial), 0, 1e-6);
  EXPECT_NEAR(norm(fan.outgoing_dirs[0] - radial), 0, 1e-6);
}

TEST(FGeod, FanAtOriginIsLowerContinuum) {
  const auto fan = direction_fan(d_origin(), {0, 0});
  EXPECT_TRUE(fan.incoming_dirs.empty());
  EXPECT_EQ(fan.outgoing_dirs.size(), 720u);
  EXPECT_TRUE(fan.outgoing_continuum);
}

TEST(FGeod, FanOnTorusCutCross) {
  // Lattice oracle: (0.5, 0.2) is reached from the translates (0, 0) and (1, 0).
  const auto fan = direction_fan(torus_field(), {0.5, 0.2});
  EXPECT_EQ(fan.incoming_dirs.size(), 2u);
  EXPECT_TRUE(fan.outgoing_dirs.empty());
  const auto corner = direction_fan(torus_field(), {0.5, 0.5});
  EXPECT_EQ(corner.incoming_dirs.size(), 4u);
}

TEST(FGeod, FanOnRandersField) {
  const Metric m = Metric::randers_zermelo({0.5, 0});
  const auto f = dist_from_set(m, ClosedSet::point({0, 0}), kBox);
  const Point2 q{1, 1};
  const auto fan = direction_fan(f, q);
  ASSERT_EQ(fan.outgoing_dirs.size(), 1u);
  // The f-geodesic through q is the straight ray from o.
  EXPECT_NEAR(norm(fan.outgoing_dirs[0] - m.normalize(q, q)), 0, 1e-6);
}

TEST(FGeod, TraceRadialRay) {
  const auto c = trace_f_geodesic(d_origin(), {1, 0}, Sense::forward, 1e-2, 20);
  EXPECT_TRUE(c.certified);
  EXPECT_EQ(*c.stop, EndReason::window_exit);
  EXPECT_NEAR(c.segment.end().x, 4.0, 1e-2);
  for (const auto& s : c.segment.samples) EXPECT_NEAR(s.pos.y, 0, 1e-6);
  EXPECT_NEAR(c.segment.t0, 1.0, 1e-9);
}

TEST(FGeod, TraceBusemannCoray) {
  const Window w{-8, 8, -8, 8, false};
  const auto b = busemann(Metric::euclidean(), {1, 0}, {0, 0}, w);
  const auto c = trace_f_geodesic(b, {0, 5}, Sense::forward, 1e-2, 20);
  EXPECT_TRUE(c.certified);
  for (const auto& s : c.segment.samples) EXPECT_NEAR(s.pos.y, 5, 1e-6);
  EXPECT_NEAR(c.segment.end().x, 8, 1e-2);
}

TEST(FGeod, TraceBackwardStopsAtOrigin) {
  const auto c = trace_f_geodesic(d_origin(), {2, 0}, Sense::backward, 1e-2, 20);
  EXPECT_EQ(*c.stop, EndReason::lower_singular);
  EXPECT_NEAR(norm(c.segment.start), 0, 1e-6);
  EXPECT_NEAR(c.segment.end().x, 2, 1e-12);
}

TEST(FGeod, TraceRejectsAmbiguousStart) {
  try {
    trace_f_geodesic(d_origin(), {0, 0}, Sense::forward, 1e-2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_differentiable);
  }
}

TEST(FGeod, MaximalExtensionOfRadialSegment) {
  const auto f = d_origin();
  const auto mx = maximal_extension(f, certify_f_geodesic(f, chord({1, 0}, {2, 0})));
  EXPECT_TRUE(mx.certificate.certified);
  EXPECT_EQ(mx.backward_end.reason, EndReason::lower_singular);
  EXPECT_NEAR(norm(mx.backward_end.point), 0, 1e-6);
  EXPECT_TRUE(mx.backward_end.extension_blocked);
  EXPECT_EQ(mx.forward_end.reason, EndReason::window_exit);
  EXPECT_LT(mx.junction_jump, 1e-6);
}

TEST(FGeod, MaximalExtensionOnTorusEndsOnCross) {
  const auto f = torus_field();
  const Vec2 u = Vec2{2, 1} / std::sqrt(5.0);
  const auto stub = certify_f_geodesic(f, integrate_geodesic(f.metric(), 0.1 * u, u, 0.05, 0.005));
  ASSERT_TRUE(stub.certified);
  const auto mx = maximal_extension(f, stub);
  EXPECT_EQ(mx.forward_end.reason, EndReason::upper_singular);
  EXPECT_NEAR(mx.forward_end.point.x, 0.5, 1e-6);
  EXPECT_NEAR(mx.forward_end.point.y, 0.25, 1e-6);
  EXPECT_TRUE(mx.forward_end.extension_blocked);
}

TEST(FGeod, CharacterizationOfRadialSegment) {
  const auto f = d_origin();
  const auto c = canonical_reparametrize(f, certify_f_geodesic(f, chord({1, 0}, {3, 0})));
  const auto rep = check_segment_characterization(f, c, 1.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.sublevel_distance, 2.0, 1e-9);
}

TEST(FGeod, CharacterizationOfBusemannSegment) {
  const auto b = busemann(Metric::euclidean(), {1, 0}, {0, 0}, kBox);
  const auto c = canonical_reparametrize(b, certify_f_geodesic(b, chord({0, 1}, {2.5, 1})));
  const auto rep = check_segment_characterization(b, c, 0.0);
  EXPECT_TRUE(rep.segment_ok);
  EXPECT_NEAR(rep.sublevel_distance, 2.5, 1e-6);
  EXPECT_EQ(rep.crossing_found, rep.crossing_samples);
}

TEST(FGeod, GradientLawOnRanders) {
  const Metric m = Metric::randers_zermelo({0.5, 0.2});
  const auto f = dist_from_set(m, ClosedSet::point({0, 0}), kBox);
  const Point2 q{-1, 2};
  const Vec2 g = finsler_gradient(f, q);
  EXPECT_NEAR(norm(g - m.normalize(q, q)), 0, 1e-6);
}
