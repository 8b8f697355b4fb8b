// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "singloc/metric.hpp"

using namespace singloc;

namespace {

Metric half_plane() {
  return Metric::riemannian([](Point2 x) { return Mat2{1 / (x.y * x.y), 0, 0, 1 / (x.y * x.y)}; }, "half-plane");
}

// sup over unit circle samples of xi(v) / F(v).
double brute_dual(const Metric& m, Point2 x, Vec2 xi) {
  double best = 0;
  for (int i = 0; i < 200000; ++i) {
    const Vec2 v = unit_angle(2 * kPi * i / 200000);
    best = std::max(best, dot(xi, v) / m.norm(x, v));
  }
  return best;
}

}  // namespace

TEST(Metric, RandersClosedFormAlongWind) {
  const Metric m = Metric::randers_zermelo({0.5, 0});
  EXPECT_NEAR(m.norm({0, 0}, {1, 0}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.norm({0, 0}, {-1, 0}), 2.0, 1e-15);
  // Crosswind: |v + t W| = t gives t = 1/sqrt(1 - 0.25).
  EXPECT_NEAR(m.norm({0, 0}, {0, 1}), 1 / std::sqrt(0.75), 1e-14);
}

TEST(Metric, ZermeloTimeMatchesDriftedMotion) {
  // Travel time t solves |v - t W| = t, i.e. moving at unit speed in the water frame.
  const Vec2 W{0.3, -0.4};
  const Metric m = Metric::randers_zermelo(W);
  for (double a : {0.0, 1.0, 2.5, 4.0}) {
    const Vec2 v = 2.0 * unit_angle(a);
    const double t = m.norm({0, 0}, v);
    EXPECT_NEAR(norm(v - t * W), t, 1e-12);
  }
}

TEST(Metric, RejectsStrongWind) {
  EXPECT_THROW(Metric::randers_zermelo({1.0, 0}), Error);
  try {
    Metric::randers_zermelo({0.8, 0.8});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_metric);
  }
}

TEST(Metric, NormHomogeneityAndZero) {
  const Metric m = Metric::randers_zermelo({0.2, 0.1});
  EXPECT_EQ(m.norm({0, 0}, {0, 0}), 0.0);
  EXPECT_NEAR(m.norm({0, 0}, {3, -6}), 3 * m.norm({0, 0}, {1, -2}), 1e-13);
  EXPECT_THROW(m.norm({0, 0}, {NAN, 0}), Error);
}

TEST(Metric, FundamentalTensorUndefinedAtZero) {
  const Metric m = Metric::randers_zermelo({0.2, 0.1});
  try {
    m.fundamental_tensor({0, 0}, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::domain_error);
  }
}

TEST(Metric, FundamentalTensorMatchesHessianOfHalfSquare) {
  const Metric m = Metric::randers_zermelo({0.4, -0.3});
  const Vec2 v{0.7, 0.2};
  const double h = 1e-4;
  auto E = [&](Vec2 w) { return 0.5 * std::pow(m.norm({0, 0}, w), 2); };
  const double gxx = (E(v + Vec2{h, 0}) - 2 * E(v) + E(v - Vec2{h, 0})) / (h * h);
  const double gyy = (E(v + Vec2{0, h}) - 2 * E(v) + E(v - Vec2{0, h})) / (h * h);
  const double gxy = (E(v + Vec2{h, h}) - E(v + Vec2{h, -h}) - E(v + Vec2{-h, h}) + E(v - Vec2{h, h})) / (4 * h * h);
  const Mat2 g = m.fundamental_tensor({0, 0}, v);
  EXPECT_NEAR(g.a, gxx, 1e-6);
  EXPECT_NEAR(g.d, gyy, 1e-6);
  EXPECT_NEAR(g.b, gxy, 1e-6);
  EXPECT_NEAR(g.bilinear(v, v), std::pow(m.norm({0, 0}, v), 2), 1e-12);
}

TEST(Metric, DualNormMatchesSupremum) {
  for (const Metric& m : {Metric::euclidean(), Metric::randers_zermelo({0.5, 0}), Metric::randers_zermelo({-0.2, 0.6}),
                          half_plane(), Metric::randers_zermelo({0.5, 0}).reverse()}) {
    const Point2 x{0.3, 1.5};
    for (Vec2 xi : {Vec2{1, 0}, Vec2{-0.4, 2.0}, Vec2{0.1, -0.7}})
      EXPECT_NEAR(m.dual_norm(x, xi), brute_dual(m, x, xi), 1e-6 * norm(xi)) << m.name();
  }
}

TEST(Metric, LegendreVectorIsDualToCovector) {
  for (const Metric& m : {Metric::randers_zermelo({0.5, 0}), half_plane(), Metric::randers_zermelo({0.1, 0.5}).reverse()}) {
    const Point2 x{0.0, 2.0};
    const Vec2 xi{0.3, -1.1};
    const Vec2 L = m.legendre_vector(x, xi);
    const double fs = m.dual_norm(x, xi);
    EXPECT_NEAR(m.norm(x, L), fs, 1e-12) << m.name();
    EXPECT_NEAR(dot(xi, L), fs * fs, 1e-12) << m.name();
    // Round trip through the Legendre covector g_L(L, .).
    const Vec2 back = m.legendre_covector(x, L);
    EXPECT_NEAR(back.x, xi.x, 1e-9);
    EXPECT_NEAR(back.y, xi.y, 1e-9);
  }
}

TEST(Metric, ReversalIsInvolution) {
  const Metric m = Metric::randers_zermelo({0.5, 0});
  const Metric r = m.reverse();
  EXPECT_TRUE(r.is_reversed());
  EXPECT_TRUE(r.reverse().same_as(m));
  EXPECT_NEAR(r.norm({0, 0}, {1, 0}), 2.0, 1e-15);
  EXPECT_NEAR(r.analytic_distance({0, 0}, {1, 0}), m.analytic_distance({1, 0}, {0, 0}), 1e-15);
  EXPECT_THROW(m.inner(), Error);
}

TEST(Metric, AnalyticDistances) {
  const Metric m = Metric::randers_zermelo({0.5, 0});
  EXPECT_NEAR(m.analytic_distance({0, 0}, {1, 0}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.analytic_distance({1, 0}, {0, 0}), 2.0, 1e-15);
  const Metric t = Metric::flat_torus(1, 1);
  EXPECT_NEAR(t.analytic_distance({0.1, 0.1}, {0.9, 0.9}), std::sqrt(0.08), 1e-14);
  EXPECT_NEAR(t.analytic_distance({0, 0}, {0.5, 0.5}), std::sqrt(0.5), 1e-14);
  EXPECT_THROW(half_plane().analytic_distance({0, 1}, {0, 2}), Error);
}

TEST(Metric, RiemannianSprayMatchesChristoffel) {
  // Half-plane: Γ^x_xy = -1/y, Γ^y_xx = 1/y, Γ^y_yy = -1/y; spray G = -Γ(v, v).
  const Metric m = half_plane();
  const Point2 x{0.2, 1.7};
  const Vec2 v{0.6, -0.8};
  const Vec2 acc = m.spray(x, v);
  EXPECT_NEAR(acc.x, 2 * v.x * v.y / x.y, 1e-6);
  EXPECT_NEAR(acc.y, -(v.x * v.x - v.y * v.y) / x.y, 1e-6);
}

TEST(Metric, ValidationPassesForAllKinds) {
  for (const Metric& m : {Metric::euclidean(), Metric::randers_zermelo({0.5, 0}), Metric::flat_torus(1, 2),
                          Metric::randers_zermelo({0.3, 0.3}).reverse(),
                          Metric::riemannian([](Point2 x) { return Mat2{2 + std::sin(x.x), 0.3, 0.3, 1 + x.y * x.y}; })}) {
    const auto rep = validate_metric(m, 200, 7);
    EXPECT_TRUE(rep.passed) << m.name();
    EXPECT_GT(rep.min_eigenvalue, 0.0);
    EXPECT_LT(rep.max_homogeneity_residual, 1e-10);
  }
}

TEST(Metric, ValidationFailsForIndefiniteTensor) {
  const Metric bad = Metric::riemannian([](Point2) { return Mat2{1, 0, 0, -1}; }, "indefinite");
  EXPECT_FALSE(validate_metric(bad, 50, 1).passed);
}

TEST(Metric, NormDecrementMatchesDirectEvaluation) {
  for (const Metric& m : {Metric::euclidean(), Metric::randers_zermelo({0.3, -0.5}), Metric::randers_zermelo({0.3, -0.5}).reverse()}) {
    const Vec2 a{1.3, 0.4}, d{-0.2, 0.9};
    EXPECT_NEAR(m.norm_decrement(a, d), m.norm({0, 0}, a) - m.norm({0, 0}, a - d), 1e-14) << m.name();
    // Long a, short d: compare with the first-order expansion dF_a(d); the remainder is O(|d|^2 / |a|).
    const Vec2 big = 1e12 * a, shift{0.3, -0.7};
    const double first_order = dot(m.legendre_covector({0, 0}, m.normalize({0, 0}, big)), shift);
    EXPECT_NEAR(m.norm_decrement(big, shift), first_order, 1e-12) << m.name();
  }
  EXPECT_THROW(Metric::riemannian([](Point2) { return Mat2::identity(); }).norm_decrement({1, 0}, {0, 1}), Error);
}
