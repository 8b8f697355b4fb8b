// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "singloc/singular.hpp"

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

// Lattice oracle: the cut locus of (0, 0) on the unit torus is {x = 1/2} u {y = 1/2}.
std::vector<Point2> exact_cross(int n) {
  std::vector<Point2> out;
  for (int k = 0; k < n; ++k) {
    out.push_back({0.5, (k + 0.5) / n});
    out.push_back({(k + 0.5) / n, 0.5});
  }
  return out;
}

}  // namespace

TEST(Singular, ClassifyBasicPoints) {
  const auto o = classify_point(d_origin(), {0, 0});
  EXPECT_EQ(o.label, SingularLabel::lower_singular);
  EXPECT_EQ(o.in_count, 0);
  const auto q = classify_point(d_origin(), {1, 2});
  EXPECT_EQ(q.label, SingularLabel::regular);
  EXPECT_TRUE(q.fast_path);
  const auto cross = classify_point(torus_field(), {0.5, 0.3});
  EXPECT_EQ(cross.label, SingularLabel::upper_singular);
  EXPECT_EQ(cross.in_count, 2);
  EXPECT_EQ(classify_point(torus_field(), {0.5, 0.5}).in_count, 4);
}

TEST(Singular, UpperAndLowerAreDisjoint) {
  const auto f = two_point();
  for (Point2 p : {Point2{0, 1}, Point2{1, 0}, Point2{0.3, 0.3}, Point2{0, 0}}) {
    const auto pc = classify_point(f, p);
    EXPECT_FALSE(pc.in_count == 0 && pc.out_count == 0 && pc.label != SingularLabel::range_boundary);
    if (pc.label == SingularLabel::upper_singular) {
      EXPECT_EQ(pc.out_count, 0);
    }
    if (pc.label == SingularLabel::lower_singular) {
      EXPECT_EQ(pc.in_count, 0);
    }
  }
}

TEST(Singular, EuclideanSourceIsSingleLowerVertex) {
  const auto g = extract_singular_locus(d_origin(), {64, {}});
  EXPECT_TRUE(g.edges.empty());
  ASSERT_EQ(g.vertices.size(), 1u);
  EXPECT_EQ(g.vertices[0].cls.label, SingularLabel::lower_singular);
  EXPECT_LT(norm(g.vertices[0].pos), 2 * g.spacing);
  EXPECT_TRUE(g.upper_nodes.empty());
}

TEST(Singular, TorusCrossMatchesLatticeOracle) {
  const auto g = extract_singular_locus(torus_field(), {128, {}});
  const double h = g.spacing;
  EXPECT_LE(hausdorff(g.upper_nodes, exact_cross(512), kTorus), 2 * h);
  EXPECT_LE(hausdorff(g.locus_points(SingularLabel::upper_singular), exact_cross(512), kTorus), 2 * h);
  EXPECT_EQ(g.undetermined_fraction, 0.0);
  // Lower locus is the source point.
  const auto lower = g.locus_points(SingularLabel::lower_singular);
  ASSERT_FALSE(lower.empty());
  for (Point2 q : lower) EXPECT_LT(norm(kTorus.displacement(q, {0, 0})), 2 * h);
}

TEST(Singular, TwoPointBisector) {
  const auto g = extract_singular_locus(two_point(), {96, {}});
  const double h = g.spacing;
  std::vector<Point2> axis;
  for (int k = 0; k <= 600; ++k) axis.push_back({0, -3 + 6.0 * k / 600});
  // Nodes on the window border are excluded from the extracted locus.
  std::vector<Point2> inner;
  for (Point2 q : axis)
    if (std::abs(q.y) <= 3 - 2 * h) inner.push_back(q);
  const auto up = g.locus_points(SingularLabel::upper_singular);
  EXPECT_LE(hausdorff(up, inner, g.window), 2 * h);
  const auto low = g.locus_points(SingularLabel::lower_singular);
  EXPECT_LE(hausdorff(low, {{-1, 0}, {1, 0}}, g.window), 2 * h);
  EXPECT_NEAR(intrinsic_distance(g, {0, 0}, {0, 1}), 1.0, 2 * h);
  EXPECT_EQ(intrinsic_distance(g, {-1, 0}, {1, 0}), kInf);
  EXPECT_THROW(intrinsic_distance(g, {2, 2}, {0, 1}), Error);
  const auto rep = verify_local_tree(g, 0.5, 30, 5);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.balls_tested, 30);
}

TEST(Singular, TorusIntrinsicDistanceAndLocalTree) {
  const auto g = extract_singular_locus(torus_field(), {128, {}});
  // Along the cross: 0.5 + 0.5, against the ambient sqrt(0.5).
  EXPECT_NEAR(intrinsic_distance(g, {0.5, 0}, {0, 0.5}), 1.0, 4 * g.spacing);
  const auto rep = verify_local_tree(g, 0.2, 50, 9);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.cycles_found, 0);
  // Globally the cross carries cycles: a ball of radius 0.6 sees the whole locus.
  EXPECT_FALSE(verify_local_tree(g, 0.75, 5, 1).passed);
  EXPECT_THROW(verify_local_tree(g, g.spacing, 1, 1), Error);
}

TEST(Singular, LocalCutLocusEquivalenceOnTorus) {
  const auto rep = check_local_cutlocus_equivalence(torus_field(), {0.5, 0.2}, 0.2);
  EXPECT_TRUE(rep.applicable);
  EXPECT_FALSE(rep.dual);
  EXPECT_GT(rep.cut_points, 0u);
  EXPECT_GT(rep.singular_points, 0u);
  EXPECT_TRUE(rep.passed) << rep.hausdorff_gap << " vs " << 2 * rep.spacing;
}

TEST(Singular, LocalCutLocusEquivalenceIsVacuousForRegularPoints) {
  const auto rep = check_local_cutlocus_equivalence(d_origin(), {1, 1}, 0.2);
  EXPECT_FALSE(rep.applicable);
  EXPECT_TRUE(rep.passed);
}

TEST(Singular, DistReconstruction) {
  const Metric m = Metric::euclidean();
  const auto f = shifted(dist_from_set(m, ClosedSet::disk({0, 0}, 1), kBox), 1.0);
  const auto rep = check_dist_reconstruction(f, 1.0, {}, 128);
  EXPECT_TRUE(rep.applicable);
  EXPECT_TRUE(rep.passed) << rep.max_error;
  const auto b = busemann(m, {1, 0}, {0, 0}, kBox);
  const auto nb = check_dist_reconstruction(b, 0.0, {}, 64);
  EXPECT_FALSE(nb.applicable);
  EXPECT_FALSE(nb.passed);
}

TEST(Singular, LimitInequalityTightAtRegularPoint) {
  const auto f = d_origin();
  const Point2 q{1, 1};
  const auto seq = approach_sequence(f, q, {1, -0.3}, ApproachSense::outgoing, 8, 0.05);
  ASSERT_EQ(seq.size(), 8u);
  const auto rep = check_limit_inequalities(f, q, seq, ApproachSense::outgoing);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.margin, 0.0, 1e-3);
  EXPECT_EQ(rep.fan_dirs, 1);
}

TEST(Singular, LimitInequalityStrictOnTorusCross) {
  // Approaching (0.5, 0.2) from the left, the other incoming geodesic (from (1, 0))
  // satisfies the inequality strictly.
  const auto f = torus_field();
  const Point2 p{0.5, 0.2};
  const auto seq = approach_sequence(f, p, {-1, 0}, ApproachSense::incoming, 8, 0.05);
  const auto rep = check_limit_inequalities(f, p, seq, ApproachSense::incoming);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.fan_dirs, 2);
  EXPECT_NEAR(rep.margin, 0.0, 1e-3);  // the matching incoming geodesic
  const Vec2 w = p / norm(p), other = (p - Vec2{1, 0}) / norm(p - Vec2{1, 0});
  EXPECT_NEAR(rep.quotient_target, dot(w, {-1, 0}), 1e-3);
  EXPECT_GT(dot(other, {-1, 0}) - dot(w, {-1, 0}), 0.5);
}

TEST(Singular, LimitInequalityBusemann) {
  const auto b = busemann(Metric::euclidean(), {1, 0}, {0, 0}, kBox);
  const auto seq = approach_sequence(b, {0.5, 0.5}, {0.3, 1}, ApproachSense::outgoing, 6, 0.05);
  const auto rep = check_limit_inequalities(b, {0.5, 0.5}, seq, ApproachSense::outgoing);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.margin, 0.0, 1e-6);
}

TEST(Extraction, FillsOnlySmallEnclosedHoles) {
  // A ring around one hole cell and a ring around a 3x3 hole; the outside stays open.
  auto ring = [](singloc::detail::Mask& m, int i0, int j0, int n) {
    for (int j = j0; j < j0 + n; ++j)
      for (int i = i0; i < i0 + n; ++i)
        if (i == i0 || j == j0 || i == i0 + n - 1 || j == j0 + n - 1) m.on[m.id(i, j)] = 1;
  };
  singloc::detail::Mask m{12, 12, false, std::vector<char>(144, 0)};
  ring(m, 0, 0, 3);
  ring(m, 5, 5, 5);
  singloc::detail::fill_small_holes(m, 4);
  EXPECT_TRUE(m.get(1, 1));
  EXPECT_FALSE(m.get(7, 7));
  EXPECT_FALSE(m.get(11, 0));
}
