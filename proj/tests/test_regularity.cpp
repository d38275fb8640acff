#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "crosscurv/report_io.hpp"
#include "support.hpp"

using namespace crosscurv;
using namespace crosscurv::testing;

namespace {

DomainSpec square(double lo0, double lo1, double hi0, double hi1) {
  Box b{P({lo0, lo1}), P({hi0, hi1})};
  return {b, b, 0.1};
}

const DomainSpec kSphereBox = square(1.0, -0.5, 2.1, 0.5);
const DomainSpec kHyperbolicBox = square(-0.5, -0.5, 0.5, 0.5);
const DomainSpec kLogBox{{P({-0.3, -0.3}), P({0.3, 0.3})}, {P({1.2, -0.3}), P({1.8, 0.3})}, 0.1};

MountainWitness load_fixture() {
  std::ifstream in(std::string(CROSSCURV_FIXTURE_DIR) + "/hyperbolic_mountain_witness.json");
  EXPECT_TRUE(in.good());
  return witness_from_json(Json::parse(in).at("witness"));
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(ClassifyRegularity, EuclidIsWeaklyRegularWithZeroMinimum) {
  auto r = classify_regularity(euclid_quadratic(2), square(-1, -1, 1, 1), 4, 8, 1e-8, 7);
  EXPECT_EQ(r.classification, Regularity::A3w);
  EXPECT_LE(std::abs(r.min_normalized), 1e-12);
  EXPECT_EQ(r.pairs_examined, 256u);
  EXPECT_EQ(r.samples, 256u * 8u);
}

TEST(ClassifyRegularity, SphereIsStrictlyRegular) {
  auto r = classify_regularity(sphere_squared(), kSphereBox, 6, 8, 1e-8, 7);
  EXPECT_EQ(r.classification, Regularity::A3s);
  EXPECT_GT(r.min_normalized, 0.0);
  EXPECT_EQ(r.nondegeneracy_failures, 0u);
}

TEST(ClassifyRegularity, HyperbolicIsViolatedWithDiagonalWitness) {
  auto r = classify_regularity(hyperbolic_squared(2), kHyperbolicBox, 4, 8, 1e-8, 7);
  EXPECT_EQ(r.classification, Regularity::Violated);
  EXPECT_LT(r.min_normalized, 0.0);
  EXPECT_LE((r.witness.x - r.witness.xb).norm(), 1e-15);
  // The witness is a genuine null direction.
  EXPECT_TRUE(is_null(hyperbolic_squared(2), r.witness.x, r.witness.xb, r.witness.p, r.witness.pb));
  // With a g-orthonormal frame at the witness the value is the diagonal constant.
  auto [p, pb] = hyperbolic_orthonormal(r.witness.x, 0.3);
  EXPECT_NEAR(cross_curvature(hyperbolic_squared(2), r.witness.x, r.witness.x, p, pb), -4.0 / 3.0, 1e-3);
}

TEST(ClassifyRegularity, LogEuclidIsStrictlyRegular) {
  auto r = classify_regularity(log_euclid(2), kLogBox, 6, 4, 1e-8, 7);
  EXPECT_EQ(r.classification, Regularity::A3s);
}

TEST(ClassifyRegularity, StableUnderRefinement) {
  for (auto [chart, box] : {std::pair{sphere_squared(), kSphereBox}, std::pair{log_euclid(2), kLogBox}}) {
    const double coarse = classify_regularity(chart, box, 8, 4, 1e-8, 3).min_normalized;
    const double fine = classify_regularity(chart, box, 16, 4, 1e-8, 3).min_normalized;
    EXPECT_LE(std::abs(fine - coarse), 0.1 * std::abs(coarse)) << chart.kind();
  }
}

TEST(ClassifyRegularity, IndependentOfWorkerCount) {
  auto a = classify_regularity(sphere_squared(), kSphereBox, 5, 6, 1e-8, 11, 1);
  auto b = classify_regularity(sphere_squared(), kSphereBox, 5, 6, 1e-8, 11, 4);
  EXPECT_EQ(dump_json(to_json(a)), dump_json(to_json(b)));
}

TEST(ClassifyRegularity, SkipsPairsOutsideTheDomain) {
  // Source and target boxes overlap, so some lattice pairs fall inside the log singular collar.
  Box b{P({-0.5, -0.5}), P({0.5, 0.5})};
  auto r = classify_regularity(log_euclid(2), DomainSpec{b, b, 0.1}, 4, 2, 1e-8);
  EXPECT_GT(r.skipped_out_of_domain, 0u);
  EXPECT_EQ(r.pairs_examined + r.skipped_out_of_domain + r.nondegeneracy_failures, 256u);
}

TEST(ClassifyRegularity, CountsNondegeneracyFailures) {
  Matrix I = Matrix::Identity(2, 2);
  auto c = convex_boundary(I, P({1, 0}), I, P({-1, 0}));
  auto r = classify_regularity(c, square(-0.5, -0.5, 0.5, 0.5), 2, 2, 1e-8);
  EXPECT_GT(r.nondegeneracy_failures, 0u);
}

TEST(ClassifyRegularity, RejectsBadInput) {
  EXPECT_THROW(classify_regularity(one_dim_family(), DomainSpec{}, 4, 4, 1e-8), InvalidSpec);
  EXPECT_THROW(classify_regularity(sphere_squared(), sphere_squared().domain(), 4, 4, 1e-8), InvalidSpec);
  EXPECT_THROW(classify_regularity(euclid_quadratic(2), square(-1, -1, 1, 1), 0, 4, 1e-8), InvalidSpec);
}

TEST(ClassifyValue, ThresholdsFollowTolerance) {
  EXPECT_EQ(classify_value(2e-8, 1e-8), Regularity::A3s);
  EXPECT_EQ(classify_value(1e-8, 1e-8), Regularity::A3w);
  EXPECT_EQ(classify_value(-1e-8, 1e-8), Regularity::A3w);
  EXPECT_EQ(classify_value(-2e-8, 1e-8), Regularity::Violated);
}

// ---------------------------------------------------------------------------

TEST(CrossCurvatureViaFd, EuclidVanishes) {
  EXPECT_LE(std::abs(cross_curvature_via_fd(euclid_quadratic(2), P({0.1, 0.2}), P({0.3, -0.1}), P({1, 0}),
                                            P({0, 1}))),
            1e-8);
}

TEST(CrossCurvatureViaFd, SphereDiagonal) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 20; ++k) {
    Point x = sphere_point(rng);
    auto [p, pb] = sphere_orthonormal(x[0], uniform(rng, 0, 6.28));
    EXPECT_NEAR(cross_curvature_via_fd(sphere_squared(), x, x, p, pb), 4.0 / 3.0, 1e-3);
  }
}

TEST(CrossCurvatureViaFd, HyperbolicDiagonal) {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 20; ++k) {
    Point z = ball_point(rng, 2, 0.5);
    auto [p, pb] = hyperbolic_orthonormal(z, uniform(rng, 0, 6.28));
    EXPECT_NEAR(cross_curvature_via_fd(hyperbolic_squared(2), z, z, p, pb), -4.0 / 3.0, 1e-3);
  }
}

TEST(CrossCurvatureViaFd, OneDimensionalOracle) {
  // Same normalization as cross_curvature: the λ = st family gives 2 at the origin.
  EXPECT_NEAR(cross_curvature_via_fd(one_dim_family(), P({0}), P({0}), P({1}), P({1})), 2.0, 1e-4);
}

TEST(CrossCurvatureViaFd, AgreesWithTensorOnAllBuiltins) {
  std::mt19937_64 rng(53);
  for (const auto& e : builtin_charts()) {
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
      auto [x, xb] = e.sample(rng);
      Point p = unit_vector(rng, e.chart.dim()), pb = unit_vector(rng, e.chart.dim());
      const double exact = cross_curvature(e.chart, x, xb, p, pb);
      double fd;
      try {
        fd = cross_curvature_via_fd(e.chart, x, xb, p, pb);
      } catch (const DomainError&) {
        continue;  // stencil near the edge of the chart
      }
      EXPECT_LE(std::abs(fd - exact), std::max(1e-3, 1e-2 * std::abs(exact))) << e.name << " k=" << k;
      ++checked;
    }
    EXPECT_GE(checked, 40) << e.name;
  }
}

TEST(CrossCurvatureViaFd, InconsistentStepIsReported) {
  FourthDerivativeConfig cfg;
  cfg.step = 0.3;
  cfg.consistency = 1e-9;
  cfg.absolute_floor = 0.0;
  cfg.max_refinements = 0;
  EXPECT_THROW(cross_curvature_via_fd(sphere_squared(), P({1.5, 0}), P({1.5, 0}), P({1, 0}), P({0, 1}), cfg),
               NumericalFailure);
}

// ---------------------------------------------------------------------------

TEST(SlidingMountain, EuclidIsAffineInT) {
  auto c = euclid_quadratic(2);
  auto ys = ball_lattice(P({0, 0}), 1.0, 7);
  auto r = sliding_mountain_check(c, P({0, 0}), P({1, 0}), P({0, 1}), ys, 17, 1e-12);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_violation, 1e-12);
  EXPECT_GE(r.max_violation, -1e-12);  // equality at an endpoint
  // f is affine in t for every y.
  for (std::size_t j = 0; j < ys.size(); ++j)
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double t = r.t[k];
      const auto J = static_cast<Eigen::Index>(j);
      EXPECT_NEAR(r.f(static_cast<Eigen::Index>(k), J), (1 - t) * r.f(0, J) + t * r.f(16, J), 1e-12);
    }
}

TEST(SlidingMountain, SphereHoldsOnRandomConfigurations) {
  auto c = sphere_squared();
  std::mt19937_64 rng(54);
  for (int k = 0; k < 50; ++k) {
    auto cfg = sphere_segment(rng);
    auto r = sliding_mountain_check(c, cfg.x, cfg.xb0, cfg.xb1, ball_lattice(cfg.x, 0.5, 7), 33, 1e-8);
    EXPECT_LE(r.max_violation, 1e-8) << k;
    EXPECT_GT(r.evaluated, 0u);
  }
}

TEST(SlidingMountain, HyperbolicFixtureWitnessViolates) {
  const auto w = load_fixture();
  EXPECT_GE(w.violation, 1e-4);
  auto c = hyperbolic_squared(2);
  auto r = sliding_mountain_check(c, w.x, w.xb0, w.xb1, {w.y}, 33, 1e-8);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.max_violation, w.violation, 1e-9 * std::abs(w.violation));
  // Independent evaluation at the witness t with the closed-form distance.
  auto seg = c_segment(c, w.x, w.xb0, w.xb1, 33);
  auto cost = [](const Point& a, const Point& b) { return 0.5 * std::pow(HyperbolicSquared::distance(a, b), 2); };
  auto f = [&](const Point& z) { return -cost(w.y, z) + cost(w.x, z); };
  const auto k = static_cast<std::size_t>(std::lround(w.t * 32));
  EXPECT_NEAR(f(seg.xb[k]) - std::max(f(seg.xb.front()), f(seg.xb.back())), w.violation,
              1e-8 * std::abs(w.violation));
}

TEST(SlidingMountain, SeededSearchReproducesTheFixture) {
  const auto w = load_fixture();
  const auto found = search_mountain_violation(hyperbolic_squared(2), ViolationSearchConfig{});
  EXPECT_GE(found.violation, 1e-4);
  EXPECT_EQ(dump_json(to_json(found)), dump_json(to_json(w)));
}

TEST(SlidingMountain, SkipsInadmissibleY) {
  auto c = log_euclid(2);
  std::vector<Point> ys = {P({0.1, 0}), P({1.2, 0.1})};  // the second sits on the segment
  auto r = sliding_mountain_check(c, P({0, 0}), P({1, 0}), P({1.2, 0.3}), ys, 9, 1e-8);
  EXPECT_EQ(r.evaluated, 1u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_TRUE(std::isnan(r.f(0, 1)));
}

TEST(SlidingMountain, WorkerCountDoesNotChangeTheResult) {
  auto c = sphere_squared();
  std::mt19937_64 rng(55);
  auto cfg = sphere_segment(rng);
  auto ys = ball_lattice(cfg.x, 0.5, 25);
  auto a = sliding_mountain_check(c, cfg.x, cfg.xb0, cfg.xb1, ys, 17, 1e-8, 1);
  auto b = sliding_mountain_check(c, cfg.x, cfg.xb0, cfg.xb1, ys, 17, 1e-8, 3);
  EXPECT_EQ(dump_json(to_json(a)), dump_json(to_json(b)));
  EXPECT_EQ(mountain_grid_csv(a), mountain_grid_csv(b));
}

// ---------------------------------------------------------------------------

TEST(CriticalPointConvexity, EuclidHasNoInteriorCriticalPoint) {
  auto r = critical_point_convexity(euclid_quadratic(2), P({0, 0}), P({0.3, 0.7}), P({1, 0}), P({0, 1}), 33);
  EXPECT_TRUE(r.empty());
}

TEST(CriticalPointConvexity, SphereSymmetricMidpointIsAMinimum) {
  const double h = std::numbers::pi / 2;
  auto r = critical_point_convexity(sphere_squared(), P({h, 0}), P({h, 0.6}), P({h - 0.5, 0.4}),
                                    P({h + 0.5, 0.4}), 33);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].first, 0.5, 1e-6);
  EXPECT_GT(r[0].second, 0.0);
}

TEST(CriticalPointConvexity, HyperbolicSymmetricSearchFindsAMaximum) {
  bool found = false;
  for (double a : {0.0, 0.2, 0.4})
    for (double b : {0.2, 0.4})
      for (double y1 : {-0.4, 0.4}) {
        auto r = critical_point_convexity(hyperbolic_squared(2), P({0, 0}), P({y1, 0}), P({a, b}), P({a, -b}), 33);
        for (auto [t, f2] : r)
          if (std::abs(t - 0.5) < 1e-6 && f2 < 0.0) found = true;
      }
  EXPECT_TRUE(found);
}

// ---------------------------------------------------------------------------

TEST(ContactConnectivity, EuclidPasses) {
  auto r = contact_connectivity_check(euclid_quadratic(2), P({0, 0}), P({1, 0}), P({0, 1}),
                                      ball_lattice(P({0, 0}), 1.0, 9), 17, 1e-10);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_deficit, 1e-10);
}

TEST(ContactConnectivity, SpherePassesOnRandomConfigurations) {
  std::mt19937_64 rng(56);
  for (int k = 0; k < 20; ++k) {
    auto cfg = sphere_segment(rng);
    auto r = contact_connectivity_check(sphere_squared(), cfg.x, cfg.xb0, cfg.xb1, ball_lattice(cfg.x, 0.5, 7), 33,
                                        1e-8);
    EXPECT_TRUE(r.passed) << k;
    EXPECT_LE(r.max_deficit, 1e-8) << k;
  }
}

TEST(ContactConnectivity, HyperbolicFailsAtTheFixture) {
  const auto w = load_fixture();
  auto r = contact_connectivity_check(hyperbolic_squared(2), w.x, w.xb0, w.xb1, ball_lattice(w.y, 0.05, 3), 33,
                                      1e-8);
  EXPECT_FALSE(r.passed);
  EXPECT_GE(r.max_deficit, 1e-4);
}

TEST(ContactConnectivity, LambdaPutsXOnTheValley) {
  auto c = sphere_squared();
  Point x = P({1.4, 0.1}), a = P({1.9, 0.4}), b = P({1.1, 0.7});
  auto r = contact_connectivity_check(c, x, a, b, {x}, 9, 1e-8);
  EXPECT_NEAR(-c.eval(x, a), r.lambda1 - c.eval(x, b), 1e-15);
}

// ---------------------------------------------------------------------------

TEST(Constants, FormulaAndNorms) {
  auto k = estimate_constants(sphere_squared(), square(1.4, -0.2, 1.8, 0.2), 4, 8);
  EXPECT_GE(k.cross_norm, 0.0);
  EXPECT_GE(k.inverse_norm, 0.0);
  EXPECT_GE(k.c2, 0.0);
  EXPECT_GE(k.c3, k.c2);
  EXPECT_DOUBLE_EQ(k.C0, 0.5 * k.report.min_normalized);
  EXPECT_EQ(k.C1, k.C0 * std::pow(2.0 * k.cross_norm, -2) * std::pow(k.inverse_norm, -2));
  EXPECT_EQ(k.classification, Regularity::A3s);
}

TEST(LocalEstimate, SphereSmallBox) {
  auto c = sphere_squared();
  auto k = estimate_constants(c, square(1.4, -0.2, 1.8, 0.2), 4, 8);
  auto r = local_estimate_check(c, P({1.6, 0}), P({1.45, -0.15}), P({1.75, 0.15}), k, 0.05, 33, 9);
  EXPECT_LE(r.max_deficit, 1e-6);
  EXPECT_GT(r.evaluated, 0u);
}

TEST(LocalEstimate, LogEuclidSmallBox) {
  auto c = log_euclid(2);
  auto k = estimate_constants(c, kLogBox, 4, 4);
  EXPECT_EQ(k.classification, Regularity::A3s);
  auto r = local_estimate_check(c, P({0, 0}), P({1.3, -0.2}), P({1.7, 0.2}), k, 0.05, 33, 9);
  EXPECT_LE(r.max_deficit, 1e-6);
}

TEST(LocalEstimate, EuclidDegeneratesToTheMaximumPrinciple) {
  auto c = euclid_quadratic(2);
  auto k = estimate_constants(c, square(-1, -1, 1, 1), 3, 4);
  EXPECT_EQ(k.C0, 0.0);
  EXPECT_EQ(k.C1, 0.0);
  auto r = local_estimate_check(c, P({0, 0}), P({0.5, 0}), P({0, 0.5}), k, 0.05, 17, 9);
  EXPECT_LE(r.max_deficit, 1e-10);
}

TEST(LocalEstimate, RefusesViolatedConstants) {
  auto c = hyperbolic_squared(2);
  auto k = estimate_constants(c, kHyperbolicBox, 3, 4);
  ASSERT_EQ(k.classification, Regularity::Violated);
  EXPECT_THROW(local_estimate_check(c, P({0, 0}), P({0.1, 0}), P({0, 0.1}), k, 0.05, 9, 5), InvalidSpec);
}

TEST(LocalEstimate, ProxyRadiusIsReported) {
  auto c = sphere_squared();
  auto k = estimate_constants(c, square(1.4, -0.2, 1.8, 0.2), 4, 8);
  const double r0 = r0_proxy(c, P({1.6, 0}), P({1.45, -0.15}), P({1.75, 0.15}), k, 0.4, 17, 7);
  EXPECT_GT(r0, 0.0);
  EXPECT_LE(local_estimate_check(c, P({1.6, 0}), P({1.45, -0.15}), P({1.75, 0.15}), k, r0, 17, 7).max_deficit, 0.0);
}

// ---------------------------------------------------------------------------

TEST(LawOfCosines, SphereHasUnitCurvature) {
  auto f = law_of_cosines_fit(sphere_squared(), P({1.2, 0.2}), std::numbers::pi / 2, 0.2, 9);
  EXPECT_NEAR(f.k, 1.0, 5e-2);
  EXPECT_FALSE(f.ill_conditioned);
}

TEST(LawOfCosines, FlatIsZero) {
  auto f = law_of_cosines_fit(euclid_quadratic(2), P({0.1, 0.05}), std::numbers::pi / 2, 0.2, 9);
  EXPECT_NEAR(f.k, 0.0, 1e-6);
}

TEST(LawOfCosines, HyperbolicHasMinusOne) {
  auto f = law_of_cosines_fit(hyperbolic_squared(2), P({0.1, 0.05}), std::numbers::pi / 2, 0.2, 9);
  EXPECT_NEAR(f.k, -1.0, 5e-2);
}

TEST(LawOfCosines, ObliqueAngleGivesTheSameCurvature) {
  auto f = law_of_cosines_fit(sphere_squared(), P({1.4, 0.0}), 1.0, 0.2, 9);
  EXPECT_NEAR(f.k, 1.0, 5e-2);
}

TEST(LawOfCosines, DiagonalLawLinksCrossCurvatureAndK) {
  struct Case {
    CostChart chart;
    Point x;
    std::pair<Point, Point> frame;
  };
  std::vector<Case> cases = {{sphere_squared(), P({1.2, 0.2}), sphere_orthonormal(1.2, 0.4)},
                             {hyperbolic_squared(2), P({0.1, 0.05}), hyperbolic_orthonormal(P({0.1, 0.05}), 0.4)}};
  for (const auto& cs : cases) {
    const double k = law_of_cosines_fit(cs.chart, cs.x, std::numbers::pi / 2, 0.2, 9).k;
    const double cross = cross_curvature(cs.chart, cs.x, cs.x, cs.frame.first, cs.frame.second);
    EXPECT_NEAR(cross, 4.0 / 3.0 * k, 5e-2) << cs.chart.kind();
  }
}

TEST(LawOfCosines, RejectsNonDistanceCosts) {
  EXPECT_THROW(law_of_cosines_fit(log_euclid(2), P({0, 0}), 1.0, 0.1, 9), Error);
  EXPECT_THROW(law_of_cosines_fit(sphere_squared(), P({1.2, 0}), 0.0, 0.1, 9), InvalidSpec);
}
