#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "demi/errors.hpp"
#include "demi/solve.hpp"
#include "oracles.hpp"

using namespace demi;

namespace {

GridFunction random_function(const GridPtr& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(g->interior_size());
  for (auto& x : v) x = nd(rng);
  return GridFunction::from_interior(g, v);
}

KernelClass star(double s, int dim, double lo, double hi, int sectors = 0) {
  return KernelClass::star(FractionalOrder(s), dim, EllipticityBounds(lo, hi), sectors);
}

}  // namespace

TEST(Operators, LinearInvariants) {
  for (auto grid : {build_grid(DomainSpec::interval(-1.0, 1.0), 65), build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 17)}) {
    auto cls = star(0.5, grid->dim(), 1.0, 2.0, grid->dim() == 2 ? 8 : 0);
    for (const auto& k : sample_kernels(cls, 5, 9)) {
      auto a = assemble_linear(k, cls, grid);
      EXPECT_LE(a.invariant_defect(), 1e-12);
      EXPECT_EQ(a.apply(GridFunction(grid)).cwiseAbs().maxCoeff(), 0.0);
      for (int i = 0; i < a.interior.rows(); ++i)
        for (int j = 0; j < a.interior.cols(); ++j)
          if (i != j) EXPECT_GE(a.interior(i, j), 0.0);
    }
  }
}

TEST(Operators, MatchesIndependentAssembly) {
  for (double s : {0.3, 0.5, 0.7})
    for (int n : {33, 65}) {
      auto g = build_grid(DomainSpec::interval(-1.0, 1.0), n);
      auto cls = star(s, 1, 1.0, 2.0);
      auto a = assemble_linear(cls.constant_density(1.5), cls, g);
      Eigen::MatrixXd ref = oracle::dense_operator_1d(s, *g, 1.5);
      EXPECT_LE((a.interior - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
    }
}

TEST(Operators, ScalingInKernel) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 65);
  auto cls = star(0.5, 1, 1.0, 2.0);
  auto a1 = assemble_linear(cls.constant_density(1.0), cls, g);
  auto a2 = assemble_linear(cls.constant_density(2.0), cls, g);
  EXPECT_LE((a2.interior - 2.0 * a1.interior).cwiseAbs().maxCoeff(), 1e-12 * a2.interior.cwiseAbs().maxCoeff());
}

TEST(Operators, SecondDifference) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 33);
  auto c = GridFunction::sample(g, [](const Point&) { return 3.0; });
  auto lin = GridFunction::sample(g, [](const Point& x) { return 2.0 * x[0] + 1.0; });
  auto q = GridFunction::sample(g, [](const Point& x) { return x[0] * x[0]; });
  int centre = g->box_index(16);
  for (int j = 1; j <= 3; ++j) {
    EXPECT_NEAR(second_difference(c, centre, {j, 0}), 0.0, 1e-14);
    EXPECT_NEAR(second_difference(lin, centre, {j, 0}), 0.0, 1e-14);
    EXPECT_NEAR(second_difference(q, centre, {j, 0}), 2.0 * (j * g->h()) * (j * g->h()), 1e-14);
  }
  // offsets leaving the domain read the exterior zero
  EXPECT_NEAR(second_difference(c, centre, {16, 0}), -6.0, 1e-14);
}

TEST(Operators, DegenerateClassReducesToLinear) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 65);
  auto cls = star(0.5, 1, 1.5, 1.5);
  auto a = assemble_linear(cls.constant_density(1.5), cls, g);
  auto u = random_function(g, 4);
  Eigen::VectorXd lin = a.apply(u);
  for (auto w : {Extremal::MplusStar, Extremal::MminusStar, Extremal::MplusFull, Extremal::MminusFull})
    EXPECT_LE((apply_extremal(cls, u, w).value.interior_values() - lin).cwiseAbs().maxCoeff(),
              1e-12 * lin.cwiseAbs().maxCoeff());
}

TEST(Operators, ExtremalDominatesSampledKernels) {
  for (auto grid : {build_grid(DomainSpec::interval(-1.0, 1.0), 65), build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 17)}) {
    auto cls = star(0.4, grid->dim(), 1.0, 2.0, grid->dim() == 2 ? 8 : 0);
    Discretization disc(cls, grid);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto u = random_function(grid, seed);
      Eigen::VectorXd up = apply_extremal(disc, u, Extremal::MplusStar).value.interior_values();
      Eigen::VectorXd um = apply_extremal(disc, u, Extremal::MminusStar).value.interior_values();
      Eigen::VectorXd fp = apply_extremal(disc, u, Extremal::MplusFull).value.interior_values();
      Eigen::VectorXd fm = apply_extremal(disc, u, Extremal::MminusFull).value.interior_values();
      double scale = fp.cwiseAbs().maxCoeff();
      EXPECT_TRUE(((fm - um).array() <= 1e-12 * scale).all());
      EXPECT_TRUE(((um - up).array() <= 1e-12 * scale).all());
      EXPECT_TRUE(((up - fp).array() <= 1e-12 * scale).all());
      for (const auto& k : sample_kernels(cls, 20, seed + 100)) {
        Eigen::VectorXd lk = assemble_linear(k, disc).apply(u);
        EXPECT_TRUE(((lk - up).array() <= 1e-12 * scale).all());
        EXPECT_TRUE(((um - lk).array() <= 1e-12 * scale).all());
      }
    }
  }
}

TEST(Operators, DualityHomogeneitySubadditivity) {
  auto g = build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 17);
  auto cls = star(0.6, 2, 0.5, 3.0, 8);
  Discretization disc(cls, g);
  auto u = random_function(g, 1), v = random_function(g, 2);
  auto neg = GridFunction::from_interior(g, -u.interior_values());
  auto sum = GridFunction::from_interior(g, u.interior_values() + v.interior_values());
  auto scaled = GridFunction::from_interior(g, 2.5 * u.interior_values());
  for (auto [p, m] : {std::pair{Extremal::MplusStar, Extremal::MminusStar}, {Extremal::MplusFull, Extremal::MminusFull}}) {
    Eigen::VectorXd pu = apply_extremal(disc, u, p).value.interior_values();
    double scale = pu.cwiseAbs().maxCoeff();
    EXPECT_LE((apply_extremal(disc, neg, m).value.interior_values() + pu).cwiseAbs().maxCoeff(), 1e-13 * scale);
    EXPECT_LE((apply_extremal(disc, scaled, p).value.interior_values() - 2.5 * pu).cwiseAbs().maxCoeff(),
              1e-12 * scale);
    Eigen::VectorXd lhs = apply_extremal(disc, sum, p).value.interior_values();
    Eigen::VectorXd rhs = pu + apply_extremal(disc, v, p).value.interior_values();
    EXPECT_TRUE(((lhs - rhs).array() <= 1e-12 * scale).all());
    Eigen::VectorXd lo = apply_extremal(disc, sum, m).value.interior_values();
    Eigen::VectorXd lo2 = apply_extremal(disc, u, m).value.interior_values() + apply_extremal(disc, v, m).value.interior_values();
    EXPECT_TRUE(((lo2 - lo).array() <= 1e-12 * scale).all());
  }
}

TEST(Operators, BellmanMatchesElementwiseMax) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 65);
  auto cls = star(0.5, 1, 1.0, 2.0);
  std::vector<NonlocalMatrix> fam;
  std::vector<Eigen::MatrixXd> dense;
  for (const auto& k : sample_kernels(cls, 5, 17)) {
    fam.push_back(assemble_linear(k, cls, g));
    dense.push_back(fam.back().interior);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto u = random_function(g, seed);
    auto [val, pol] = apply_bellman(fam, u);
    Eigen::VectorXd ref = oracle::elementwise_max(dense, u.interior_values());
    EXPECT_LE((val.interior_values() - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
    for (int i = 0; i < g->interior_size(); ++i) {
      Eigen::VectorXd chosen = fam[static_cast<std::size_t>(pol[i])].apply(u);
      EXPECT_EQ(chosen[i], val.interior_values()[i]);
    }
  }
}

TEST(Operators, BellmanExamples) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 33);
  auto cls = star(0.5, 1, 1.0, 2.0);
  auto a = assemble_linear(cls.constant_density(1.0), cls, g);
  auto a2 = assemble_linear(cls.constant_density(2.0), cls, g);
  // torsion function: A u = -1
  auto u = solve_linear_dirichlet(a, 0.0, GridFunction::sample(g, [](const Point&) { return -1.0; })).u;
  std::vector<NonlocalMatrix> single{a};
  auto [v1, p1] = apply_bellman(single, u);
  EXPECT_EQ(v1.interior_values(), a.apply(u));
  for (int p : p1) EXPECT_EQ(p, 0);
  // A u < 0, so the smaller kernel wins
  Eigen::VectorXd au = a.apply(u);
  ASSERT_TRUE((au.array() < 0).all());
  std::vector<NonlocalMatrix> pair{a, a2};
  auto [v2, p2] = apply_bellman(pair, u);
  for (int p : p2) EXPECT_EQ(p, 0);

  auto other = build_grid(DomainSpec::interval(-1.0, 1.0), 17);
  std::vector<NonlocalMatrix> mixed{a, assemble_linear(cls.constant_density(1.0), cls, other)};
  try {
    apply_bellman(mixed, u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Operators, FiniteFamilyHasNoExtremal) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 17);
  EllipticityBounds b(1.0, 2.0);
  std::vector<double> one{1.0};
  auto fam = KernelClass::finite(FractionalOrder(0.5), 1, b, {make_angular_density(one, b, 1)});
  try {
    apply_extremal(fam, GridFunction(g), Extremal::MplusStar);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedVariant);
  }
}

TEST(Operators, PolicyMatrixReproducesBellman) {
  EllipticityBounds b(1.0, 2.0);
  std::vector<double> v1{1.0}, v2{1.7};
  for (auto grid : {build_grid(DomainSpec::interval(-1.0, 1.0), 49), build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 15)}) {
    int dim = grid->dim();
    std::vector<BellmanOperator> ops{
        BellmanOperator::from_class(star(0.5, dim, 1.0, 2.0, dim == 2 ? 8 : 0), grid),
        BellmanOperator::from_class(KernelClass::full(FractionalOrder(0.5), dim, b, dim == 2 ? 8 : 0), grid)};
    if (dim == 1)
      ops.push_back(BellmanOperator::from_class(
          KernelClass::finite(FractionalOrder(0.5), 1, b, {make_angular_density(v1, b, 1), make_angular_density(v2, b, 1)}),
          grid));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Eigen::VectorXd box(grid->box_size());
    for (auto& x : box) x = nd(rng);
    auto u = GridFunction::from_box(grid, box, true);
    for (const auto& op : ops) {
      auto pol = op.improve(u);
      Eigen::VectorXd direct = op.apply(u);
      Eigen::VectorXd via = op.interior_matrix(pol) * u.interior_values() + op.exterior_action(pol, u);
      EXPECT_LE((direct - via).cwiseAbs().maxCoeff(), 1e-11 * direct.cwiseAbs().maxCoeff());
      // every other policy gives a smaller value
      auto low = op.uniform_policy(0);
      Eigen::VectorXd other = op.interior_matrix(low) * u.interior_values() + op.exterior_action(low, u);
      EXPECT_TRUE(((other - direct).array() <= 1e-11 * direct.cwiseAbs().maxCoeff()).all());
    }
  }
}
