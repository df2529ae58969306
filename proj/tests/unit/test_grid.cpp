#include <cmath>

#include <gtest/gtest.h>

#include "demi/errors.hpp"
#include "demi/grid.hpp"

using namespace demi;

TEST(Grid, IntervalExample) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 9);
  EXPECT_DOUBLE_EQ(g->origin()[0], -1.25);
  EXPECT_DOUBLE_EQ(g->h(), 0.3125);
  EXPECT_EQ(g->box_size(), 9);
  EXPECT_EQ(g->interior_size(), 7);
  for (int i = 0; i < g->interior_size(); ++i) {
    double x = g->coordinates(g->interior()[i])[0];
    EXPECT_LT(std::abs(x), 1.0);
    EXPECT_DOUBLE_EQ(g->delta()[i], 1.0 - std::abs(x));
  }
}

TEST(Grid, BallMaskMatchesMembership) {
  auto g = build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 17);
  EXPECT_EQ(g->dim(), 2);
  EXPECT_EQ(g->box_size(), 17 * 17);
  int count = 0;
  for (int b = 0; b < g->box_size(); ++b) {
    auto x = g->coordinates(b);
    bool inside = x[0] * x[0] + x[1] * x[1] < 1.0;
    EXPECT_EQ(g->slot(b) >= 0, inside);
    count += inside;
  }
  EXPECT_EQ(count, g->interior_size());
}

TEST(Grid, Rejections) {
  EXPECT_THROW(build_grid(DomainSpec::interval(-1.0, 1.0), 7), Error);
  try {
    DomainSpec(UnionOfIntervals{{{0.0, 1.0}, {0.5, 2.0}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  EXPECT_THROW(DomainSpec::interval(1.0, 1.0), Error);
  EXPECT_THROW(DomainSpec::ball({0.0, 0.0}, 0.0), Error);
}

TEST(Grid, UnionDistance) {
  DomainSpec d(UnionOfIntervals{{{-2.0, -1.0}, {1.0, 2.0}}});
  EXPECT_DOUBLE_EQ(d.distance_to_complement({-1.5, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(d.distance_to_complement({0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(d.smallest_gap(), 2.0);
  auto g = build_grid(d, 65);
  for (int i = 0; i < g->interior_size(); ++i) EXPECT_TRUE(d.contains(g->coordinates(g->interior()[i])));
}

TEST(Grid, StaggeredPlacementPutsBoundaryBetweenNodes) {
  for (int n : {33, 65, 129}) {
    auto g = build_grid(DomainSpec::interval(-1.0, 1.0), n, Placement::Staggered);
    double t = (1.0 - g->origin()[0]) / g->h();
    EXPECT_NEAR(t - std::floor(t), 0.5, 1e-9);
  }
}

TEST(Grid, SharedLattice) {
  auto big = build_grid(DomainSpec::interval(-2.0, 2.0), 65);
  auto small = build_grid_on(DomainSpec::interval(-1.0, 1.0), *big);
  EXPECT_EQ(small->h(), big->h());
  EXPECT_EQ(small->box_size(), big->box_size());
  EXPECT_LT(small->interior_size(), big->interior_size());
}

TEST(GridFunction, ExteriorRule) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 17);
  Eigen::VectorXd box = Eigen::VectorXd::Ones(g->box_size());
  auto u = GridFunction::from_box(g, box, false);
  auto w = GridFunction::from_box(g, box, true);
  for (int b = 0; b < g->box_size(); ++b) {
    EXPECT_EQ(u.at(b), g->slot(b) >= 0 ? 1.0 : 0.0);
    EXPECT_EQ(w.at(b), 1.0);
  }
  EXPECT_EQ(u.at(-1), 0.0);
  EXPECT_EQ(u.interior_values().size(), g->interior_size());
  EXPECT_EQ(u.exterior_part().sup_norm(), 0.0);
  EXPECT_EQ(w.exterior_part().sup_norm(), 1.0);
  EXPECT_THROW(GridFunction::from_interior(g, Eigen::VectorXd::Ones(3)), Error);
}
