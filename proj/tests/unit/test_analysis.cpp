#include <cmath>

#include <gtest/gtest.h>

#include "demi/analysis.hpp"
#include "demi/errors.hpp"

using namespace demi;

namespace {

const KernelClass kStar = KernelClass::star(FractionalOrder(0.5), 1, EllipticityBounds(1.0, 2.0));

GridPtr unit_grid(int n) { return build_grid(DomainSpec::interval(-1.0, 1.0), n); }

}  // namespace

TEST(MaximumPrinciple, ProbeHoldsBelowTheHalfEigenvalue) {
  auto g = unit_grid(129);
  double lp = krein_rutman(kStar, g, Cone::Positive).pair.value;
  auto a = maximum_principle_probe(kStar, g, 0.9 * lp, 20, 5);
  auto b = maximum_principle_probe(kStar, g, 0.9 * lp, 20, 5);
  EXPECT_TRUE(a.passed());
  EXPECT_EQ(a.trials, 20);
  EXPECT_GE(a.worst_margin, -1e-10);
  ASSERT_EQ(a.details.size(), b.details.size());
  for (std::size_t i = 0; i < a.details.size(); ++i) EXPECT_EQ(a.details[i].values, b.details[i].values);
  EXPECT_TRUE(maximum_principle_probe(kStar, g, -3.0, 10, 1).passed());
  try {
    maximum_principle_probe(kStar, g, lp * 1.01, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
  }
}

TEST(MaximumPrinciple, SignOfSolutions) {
  auto g = unit_grid(129);
  auto one = GridFunction::sample(g, [](const Point&) { return 1.0; });
  auto r = solve_bellman_dirichlet(make_problem(kStar, g, 0.0, one));
  EXPECT_TRUE((r.u.interior_values().array() < 0).all());
}

TEST(DomainMonotonicity, NestedIntervals) {
  auto r = domain_sweep(kStar, {DomainSpec::interval(-0.5, 0.5), DomainSpec::interval(-1.0, 1.0),
                                DomainSpec::interval(-2.0, 2.0)}, 257);
  EXPECT_TRUE(r.passed());
  auto same = domain_sweep(kStar, {DomainSpec::interval(-1.0, 1.0), DomainSpec::interval(-1.0, 1.0)}, 129);
  EXPECT_TRUE(same.passed());
  EXPECT_EQ(same.details[0].values.at("lambda_plus"), same.details[1].values.at("lambda_plus"));
  try {
    domain_sweep(kStar, {DomainSpec::interval(-1.0, 1.0), DomainSpec::interval(0.5, 3.0)}, 65);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridIncompatibility);
  }
}

TEST(DomainMonotonicity, ContinuityFromOutside) {
  auto r = continuity_sweep(kStar, Interval{-1.0, 1.0}, {4, 8, 16}, 257);
  EXPECT_TRUE(r.passed());
}

TEST(BoundaryFit, RecoversSyntheticPowers) {
  auto g = unit_grid(1025);
  const auto& d = g->domain();
  for (double p : {0.3, 0.5, 0.7, 1.0}) {
    auto psi = GridFunction::sample(g, [&](const Point& x) { return 2.0 * std::pow(d.distance_to_complement(x), p); });
    auto fit = boundary_fit(psi, d, FractionalOrder(0.5));
    EXPECT_NEAR(fit.exponent, p, 1e-10);
    if (p == 0.5) {
      EXPECT_NEAR(fit.c1, 2.0, 1e-12);
      EXPECT_NEAR(fit.C, 2.0, 1e-12);
    }
    EXPECT_NEAR(fit.r2, 1.0, 1e-12);
    EXPECT_GE(fit.band_lo, 2.0 * g->h() - 1e-15);
    EXPECT_LE(fit.band_hi, 0.2 * d.inradius() + 1e-15);
    auto neg = GridFunction::from_interior(g, -psi.interior_values());
    EXPECT_NEAR(boundary_fit(neg, d, FractionalOrder(0.5)).exponent, p, 1e-10);
  }
  auto coarse = unit_grid(9);
  auto flat = GridFunction::sample(coarse, [](const Point&) { return 1.0; });
  try {
    boundary_fit(flat, coarse->domain(), FractionalOrder(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientLayerNodes);
  }
}

TEST(BoundaryFit, EigenfunctionExponentNearOrder) {
  auto g = unit_grid(513);
  auto p = krein_rutman(kStar, g, Cone::Positive);
  auto fit = boundary_fit(p.pair.eigenfunction, g->domain(), FractionalOrder(0.5));
  EXPECT_NEAR(fit.exponent, 0.5, 0.1);
  EXPECT_GT(fit.c1, 0.0);
  EXPECT_LE(fit.c1, fit.C);
}

TEST(AntiMaximum, LinearSignFlipAcrossTheEigenvalue) {
  auto g = unit_grid(129);
  auto cls = KernelClass::star(FractionalOrder(0.5), 1, EllipticityBounds(1.0, 1.0));
  auto a = assemble_linear(cls.constant_density(1.0), cls, g);
  double lam = linear_principal_eigen(a).first;
  auto f = GridFunction::sample(g, [](const Point& x) { return -std::pow(1.0 - x[0] * x[0], 2); });
  for (double eps : {0.01, 0.05}) {
    auto above = solve_linear_dirichlet(a, lam * (1 + eps), f);
    auto below = solve_linear_dirichlet(a, lam * (1 - eps), f);
    EXPECT_TRUE((above.u.interior_values().array() < 0).all());
    EXPECT_TRUE((below.u.interior_values().array() > 0).all());
  }
}

TEST(AntiMaximum, ProbeOnTheExtremalClass) {
  auto g = unit_grid(129);
  auto f = GridFunction::sample(g, [](const Point& x) { return -std::pow(1.0 - x[0] * x[0], 2); });
  auto r = anti_maximum_probe(kStar, g, f, {0.01, 0.05}, 3, 3);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.trials, 0);
  auto pos = GridFunction::sample(g, [](const Point&) { return 1.0; });
  try {
    anti_maximum_probe(kStar, g, pos, {0.01}, 3, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
  }
}

TEST(Isolation, WindowAndProbe) {
  EXPECT_DOUBLE_EQ(isolation_window(1.0, 2.0), 0.2);
  auto g = unit_grid(129);
  double lp = krein_rutman(kStar, g, Cone::Positive).pair.value;
  double lm = krein_rutman(kStar, g, Cone::Negative).pair.value;
  auto r = isolation_probe(kStar, g, {-1.0, lp, 0.5 * (lp + lm), lm}, 4, 2);
  EXPECT_TRUE(r.passed());
}

TEST(Sandwich, ChainHolds) {
  auto g = unit_grid(129);
  auto r = sandwich_test(kStar, g, 8, 4);
  EXPECT_TRUE(r.passed());
  auto unit = KernelClass::star(FractionalOrder(0.5), 1, EllipticityBounds(1.3, 1.3));
  EXPECT_TRUE(sandwich_test(unit, g, 3, 1).passed());
}

TEST(Ellipticity, MonotoneInTheLowerBound) {
  auto g = unit_grid(65);
  auto r = ellipticity_sweep(kStar, g, {0.25, 0.5, 1.0, 1.5, 2.0});
  EXPECT_TRUE(r.passed());
}
