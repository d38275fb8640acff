#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "crosscurv/geodesics.hpp"
#include "support.hpp"

using namespace crosscurv;
using namespace crosscurv::testing;

namespace {

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return g;
}

}  // namespace

TEST(CExp, EuclidIsTranslation) {
  auto c = euclid_quadratic(2);
  Point x = P({0.2, -0.3}), p = P({0.7, 1.1});
  EXPECT_TRUE(c_exp(c, x, p, x).isApprox(x + p, 1e-12));
  EXPECT_TRUE(c_star_exp(c, x, p, x).isApprox(x + p, 1e-12));
}

TEST(CExp, LogEuclidClosedForm) {
  auto c = log_euclid(2);
  std::mt19937_64 rng(41);
  for (int k = 0; k < 100; ++k) {
    Point x = uniform_point(rng, 2, -1, 1);
    Point q = unit_vector(rng, 2) * uniform(rng, 0.5, 3.0);
    Point closed = x - q / q.squaredNorm();
    Point guess = closed + 0.05 * unit_vector(rng, 2) / q.norm();
    EXPECT_LE((c_exp(c, x, q, guess) - closed).norm(), 1e-8);
    Point closed_star = x - q / q.squaredNorm();  // symmetric cost: same formula from x̄ = x
    EXPECT_LE((c_star_exp(c, x, q, guess) - closed_star).norm(), 1e-8);
  }
}

TEST(CExp, SphereIsRiemannianExponential) {
  auto c = sphere_squared();
  std::mt19937_64 rng(42);
  int checked = 0;
  for (int k = 0; k < 60; ++k) {
    Point x = sphere_point(rng);
    Point v = unit_vector(rng, 2) * uniform(rng, 0.1, 1.2);
    Point expected = sphere_exp(x, v);
    // The chart omits the poles; keep arcs that stay inside it.
    bool inside = true;
    for (int j = 1; j <= 20; ++j) inside = inside && c.in_domain(x, sphere_exp(x, v * (j / 20.0)));
    if (!inside) continue;
    Point pstar = SphereSquared::metric(x) * v;  // p* = g(v, ·)
    EXPECT_LE((c_exp(c, x, pstar, x) - expected).norm(), 1e-8);
    EXPECT_LE((c_star_exp(c, x, pstar, x) - expected).norm(), 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(CExp, LeftRightInverse) {
  std::mt19937_64 rng(43);
  for (const auto& e : builtin_charts()) {
    for (int k = 0; k < 20; ++k) {
      auto [x, xb] = e.sample(rng);
      Point guess = x + 1e-3 * unit_vector(rng, e.chart.dim());
      if (!e.chart.in_domain(guess, xb)) guess = x;
      Point back = c_star_exp(e.chart, xb, -e.chart.grad_xb(x, xb), guess);
      EXPECT_LE((back - x).norm(), 1e-8) << e.name;
      Point fwd = c_exp(e.chart, x, -e.chart.grad_x(x, xb), xb + 1e-3 * (x - xb));
      EXPECT_LE((fwd - xb).norm(), 1e-8) << e.name;
    }
  }
}

TEST(CExp, FailuresCarryTheLastIterate) {
  Matrix I = Matrix::Identity(2, 2);
  auto degenerate = convex_boundary(I, P({1, 0}), I, P({-1, 0}));
  try {
    c_exp(degenerate, P({0, 0}), P({0.1, 0.1}), P({0, 0}));
    FAIL();
  } catch (const SingularJacobian& e) {
    EXPECT_EQ(e.last_iterate().size(), 2);
  }
  NewtonConfig one;
  one.max_iterations = 1;
  auto sphere = sphere_squared();
  try {
    c_exp(sphere, P({1.5, 0}), P({0, 1.0}), P({1.5, 0}), one);
    FAIL();
  } catch (const NoConvergence& e) {
    EXPECT_TRUE(sphere.in_domain(P({1.5, 0}), e.last_iterate()));
  }
  NewtonConfig bad;
  bad.tolerance = 0;
  EXPECT_THROW(c_exp(sphere, P({1.5, 0}), P({0, 1.0}), P({1.5, 0}), bad), InvalidSpec);
  EXPECT_THROW(c_exp(sphere, P({1.5, 0}), P({0, 1.0}), P({0.01, 0})), DomainError);
}

TEST(CSegmentTest, EuclidIsAffine) {
  auto c = euclid_quadratic(2);
  Point x = P({0, 0}), a = P({1, 0}), b = P({-0.5, 2});
  auto seg = c_segment(c, x, a, b, 11);
  for (std::size_t k = 0; k < seg.size(); ++k)
    EXPECT_LE((seg.xb[k] - ((1 - seg.t[k]) * a + seg.t[k] * b)).norm(), 1e-12);
  EXPECT_LE(geodesic_residual(c, seg), 1e-10);
}

TEST(CSegmentTest, SphereIsRadialInterpolationThenExponential) {
  auto c = sphere_squared();
  Point x = P({1.2, 0.1});
  Point v0 = P({0.5, 0.4}), v1 = P({-0.3, 0.9});
  Point a = sphere_exp(x, v0), b = sphere_exp(x, v1);
  auto seg = c_segment(c, x, a, b, 33);
  for (std::size_t k = 0; k < seg.size(); ++k) {
    const double t = seg.t[k];
    EXPECT_LE((seg.xb[k] - sphere_exp(x, (1 - t) * v0 + t * v1)).norm(), 1e-8);
  }
}

TEST(CSegmentTest, ResidualIsSecondOrderOnCurvedCosts) {
  struct Case {
    CostChart chart;
    Point x, a, b;
  };
  std::vector<Case> cases = {{sphere_squared(), P({1.2, 0.1}), P({1.6, 0.4}), P({1.0, 1.0})},
                             {log_euclid(2), P({0, 0}), P({1.5, 0}), P({1.3, 0.6})}};
  for (const auto& cs : cases) {
    const double r65 = geodesic_residual(cs.chart, c_segment(cs.chart, cs.x, cs.a, cs.b, 65));
    const double r129 = geodesic_residual(cs.chart, c_segment(cs.chart, cs.x, cs.a, cs.b, 129));
    EXPECT_LE(r65, 1e-4) << cs.chart.kind();
    EXPECT_GT(r65 / r129, 3.0) << cs.chart.kind();
    EXPECT_LT(r65 / r129, 5.0) << cs.chart.kind();
  }
}

TEST(CSegmentTest, CorruptedSampleIsDetected) {
  auto c = sphere_squared();
  auto seg = c_segment(c, P({1.2, 0.1}), P({1.8, 0.5}), P({0.9, 1.3}), 65);
  seg.xb[30][0] += 1e-2;
  EXPECT_GE(geodesic_residual(c, seg), 1e-1);
}

TEST(CSegmentTest, ReversalIsAffineReparameterization) {
  std::mt19937_64 rng(44);
  for (const auto& e : builtin_charts()) {
    auto [x, a] = e.sample(rng);
    Point b = a + 0.2 * unit_vector(rng, e.chart.dim());
    if (!e.chart.in_domain(x, b)) continue;
    auto fwd = c_segment(e.chart, x, a, b, 21);
    auto rev = c_segment(e.chart, x, b, a, 21);
    for (std::size_t k = 0; k < fwd.size(); ++k)
      EXPECT_LE((fwd.xb[k] - rev.xb[fwd.size() - 1 - k]).norm(), 1e-8) << e.name;
  }
}

TEST(CSegmentTest, VerticalVelocitiesAreNull) {
  auto c = sphere_squared();
  auto seg = c_segment(c, P({1.2, 0.1}), P({1.8, 0.5}), P({0.9, 1.3}), 33);
  for (std::size_t k = 1; k + 1 < seg.size(); ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    v.tail(2) = (seg.xb[k + 1] - seg.xb[k - 1]) / (seg.t[k + 1] - seg.t[k - 1]);
    EXPECT_LE(std::abs(h_inner(c, seg.x, seg.xb[k], v, v)), 1e-8 * v.squaredNorm());
  }
}

TEST(CSegmentTest, TooFewSamplesRejected) {
  auto c = euclid_quadratic(1);
  auto seg = c_segment(c, P({0}), P({1}), P({2}), 4);
  EXPECT_THROW(geodesic_residual(c, seg), InvalidSpec);
}

TEST(CSegmentTest, FailureReportsParameter) {
  auto c = log_euclid(2);
  // The straight covector path from x̄₀ to x̄₁ passes through q* = 0, i.e. x̄ = ∞.
  try {
    c_segment(c, P({0, 0}), P({1, 0}), P({-1, 0}), 11);
    FAIL();
  } catch (const SegmentFailure& e) {
    EXPECT_GT(e.parameter(), 0.0);
    EXPECT_LE(e.parameter(), 1.0);
  }
}

TEST(HorizontalGeodesic, EuclidIsStraight) {
  auto c = euclid_quadratic(2);
  Point x = P({0.1, 0.2}), xb = P({1, -1}), p = P({0.3, -0.7});
  for (const auto& [s, xs] : horizontal_geodesic(c, x, xb, p, uniform_grid(-1, 1, 9)))
    EXPECT_LE((xs - (x + s * p)).norm(), 1e-12);
}

TEST(HorizontalGeodesic, SphereDiagonalIsGreatCircle) {
  auto c = sphere_squared();
  Point x = P({1.1, 0.3}), p = P({0.4, 0.8});
  for (const auto& [s, xs] : horizontal_geodesic(c, x, x, p, uniform_grid(-1, 1, 21)))
    EXPECT_LE((xs - sphere_exp(x, s * p)).norm(), 1e-8);
}

TEST(HorizontalGeodesic, InitialVelocityAndResidual) {
  std::mt19937_64 rng(45);
  for (const auto& e : builtin_charts()) {
    auto [x, xb] = e.sample(rng);
    Point p = unit_vector(rng, e.chart.dim());
    const double h = 1e-3;
    auto near = horizontal_geodesic(e.chart, x, xb, p, {-h, 0.0, h});
    EXPECT_LE((near[1].second - x).norm(), 1e-10) << e.name;
    EXPECT_LE(((near[2].second - near[0].second) / (2 * h) - p).norm(), 1e-6) << e.name;
    auto samples = horizontal_geodesic(e.chart, x, xb, p, uniform_grid(-0.1, 0.1, 65));
    EXPECT_LE(horizontal_residual(e.chart, xb, samples), 1e-4) << e.name;
  }
}
