// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "pilotsim/scenario.hpp"

namespace pilotsim {
namespace {

PathlossParams no_shadowing() {
  PathlossParams p;
  p.shadowing_sigma_db = 0.0;
  return p;
}

TEST(BuildLayout, SingleCellAtOrigin) {
  const CellLayout layout = build_layout(1, PathlossParams{});
  ASSERT_EQ(layout.num_cells(), 1u);
  EXPECT_EQ(layout.centers[0].x, 0.0);
  EXPECT_EQ(layout.centers[0].y, 0.0);
}

TEST(BuildLayout, SevenCellsRingAtSqrt3Radius) {
  const CellLayout layout = build_layout(7, PathlossParams{});
  ASSERT_EQ(layout.num_cells(), 7u);
  EXPECT_EQ(layout.centers[0].x, 0.0);
  EXPECT_EQ(layout.centers[0].y, 0.0);
  for (std::size_t n = 1; n < 7; ++n) {
    EXPECT_NEAR(distance(layout.centers[0], layout.centers[n]), 866.0254, 1e-3);
    EXPECT_TRUE(layout.adjacent(0, n));
  }
  for (std::size_t a = 0; a < 7; ++a)
    for (std::size_t b = a + 1; b < 7; ++b)
      EXPECT_GT(distance(layout.centers[a], layout.centers[b]), 1.0);
}

TEST(BuildLayout, ThreeCellsPairwiseAdjacentByBruteForce) {
  const CellLayout layout = build_layout(3, PathlossParams{});
  ASSERT_EQ(layout.num_cells(), 3u);
  const double expected = std::sqrt(3.0) * 500.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == b) continue;
      const double dx = layout.centers[a].x - layout.centers[b].x;
      const double dy = layout.centers[a].y - layout.centers[b].y;
      EXPECT_NEAR(std::sqrt(dx * dx + dy * dy), expected, 1e-9);
    }
}

TEST(BuildLayout, RejectsUnsupportedCountNamingSupportedValues) {
  try {
    build_layout(4, PathlossParams{});
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1, 3, 7"), std::string::npos) << msg;
  }
}

TEST(DropUsers, PostconditionsHold) {
  const PathlossParams params;
  const CellLayout layout = build_layout(7, params);
  Rng rng(42);
  const UserDrop drop = drop_users(layout, 10, params, rng);
  ASSERT_EQ(drop.positions.size(), 70u);
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t k = 0; k < 10; ++k) {
      EXPECT_TRUE(layout.contains(j, drop.at(j, k)));
      for (const Point& bs : layout.centers)
        EXPECT_GE(distance(bs, drop.at(j, k)), params.min_distance);
    }
}

TEST(DropUsers, SameSeedSamePositions) {
  const PathlossParams params;
  const CellLayout layout = build_layout(7, params);
  Rng a(7), b(7);
  const UserDrop da = drop_users(layout, 5, params, a);
  const UserDrop db = drop_users(layout, 5, params, b);
  for (std::size_t i = 0; i < da.positions.size(); ++i) {
    EXPECT_EQ(da.positions[i].x, db.positions[i].x);
    EXPECT_EQ(da.positions[i].y, db.positions[i].y);
  }
}

TEST(DropUsers, MeanPositionNearCentroid) {
  const PathlossParams params;
  const CellLayout layout = build_layout(1, params);
  Rng rng(3);
  constexpr int n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const Point p = drop_users(layout, 1, params, rng).at(0, 0);
    sx += p.x;
    sy += p.y;
    sxx += p.x * p.x;
    syy += p.y * p.y;
  }
  const double mx = sx / n, my = sy / n;
  const double se_x = std::sqrt((sxx / n - mx * mx) / n);
  const double se_y = std::sqrt((syy / n - my * my) / n);
  EXPECT_LT(std::abs(mx), 3.0 * se_x);
  EXPECT_LT(std::abs(my), 3.0 * se_y);
}

TEST(DropUsers, RejectsMinDistanceAtRadius) {
  PathlossParams params;
  const CellLayout layout = build_layout(1, params);
  params.min_distance = params.cell_radius;
  Rng rng(1);
  EXPECT_THROW(drop_users(layout, 1, params, rng), std::invalid_argument);
}

UserDrop single_user_at(Point p) {
  UserDrop d;
  d.users_per_cell = 1;
  d.positions = {p};
  return d;
}

TEST(LargeScaleFading, EdgeUserSeesReferenceGain) {
  const PathlossParams params = no_shadowing();
  const CellLayout layout = build_layout(1, params);
  Rng rng(1);
  const double rho_d = 2.0;
  const LsfTensor psi = compute_large_scale_fading(layout, single_user_at({500.0, 0.0}), params,
                                                   rng, rho_d, 1.0);
  EXPECT_NEAR(psi(0, 0, 0), 10.0 / rho_d, 1e-12);
}

TEST(LargeScaleFading, HalvingDistanceScalesByPowerLaw) {
  const PathlossParams params = no_shadowing();
  const CellLayout layout = build_layout(1, params);
  Rng rng(1);
  const double far = compute_large_scale_fading(layout, single_user_at({400.0, 0.0}), params, rng)(0, 0, 0);
  const double near = compute_large_scale_fading(layout, single_user_at({200.0, 0.0}), params, rng)(0, 0, 0);
  EXPECT_NEAR(near / far, 13.9288, 1e-3);
}

TEST(LargeScaleFading, ShadowingSpreadMatches) {
  const PathlossParams params;
  const CellLayout layout = build_layout(1, params);
  const UserDrop drop = single_user_at({300.0, 0.0});
  Rng rng(11);
  constexpr int n = 100000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(compute_large_scale_fading(layout, drop, params, rng)(0, 0, 0));
    s += db;
    ss += db * db;
  }
  const double mean = s / n;
  const double sd = std::sqrt((ss - n * mean * mean) / (n - 1));
  EXPECT_NEAR(sd, 8.0, 0.1);
}

TEST(LargeScaleFading, TranslationInvariant) {
  const PathlossParams params;
  const CellLayout layout = build_layout(7, params);
  Rng geo(5);
  const UserDrop drop = drop_users(layout, 4, params, geo);
  CellLayout moved = layout;
  UserDrop moved_drop = drop;
  for (Point& c : moved.centers) c = {c.x + 1234.5, c.y - 678.25};
  for (Point& p : moved_drop.positions) p = {p.x + 1234.5, p.y - 678.25};
  Rng a(9), b(9);
  const LsfTensor pa = compute_large_scale_fading(layout, drop, params, a);
  const LsfTensor pb = compute_large_scale_fading(moved, moved_drop, params, b);
  for (std::size_t i = 0; i < pa.values().size(); ++i)
    EXPECT_NEAR(pb.values()[i] / pa.values()[i], 1.0, 1e-9);
}

TEST(LargeScaleFading, StrictlyDecreasingInDistanceWithoutShadowing) {
  const PathlossParams params = no_shadowing();
  const CellLayout layout = build_layout(1, params);
  Rng rng(1);
  double previous = std::numeric_limits<double>::infinity();
  for (double r = 35.0; r <= 500.0; r += 5.0) {
    const double g = compute_large_scale_fading(layout, single_user_at({0.0, r * 0.8}), params, rng)(0, 0, 0);
    EXPECT_LT(g, previous);
    previous = g;
  }
}

TEST(LargeScaleFading, EntriesPositiveFiniteServingStrongest) {
  const PathlossParams params = no_shadowing();
  const CellLayout layout = build_layout(7, params);
  Rng rng(21);
  const UserDrop drop = drop_users(layout, 10, params, rng);
  const LsfTensor psi = compute_large_scale_fading(layout, drop, params, rng);
  for (double v : psi.values()) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  for (std::size_t j = 0; j < 7; ++j)
    for (std::size_t k = 0; k < 10; ++k)
      for (std::size_t l = 0; l < 7; ++l)
        if (l != j) {
          EXPECT_GT(psi(j, j, k), psi(l, j, k));
        }
}

TEST(LsfTensor, SqrtGainsIsDiagonalOfD) {
  LsfTensor psi(2, 3);
  psi(1, 0, 2) = 9.0;
  psi(1, 0, 0) = 4.0;
  const Eigen::VectorXd d = psi.sqrt_gains(1, 0);
  EXPECT_EQ(d(0), 2.0);
  EXPECT_EQ(d(1), 0.0);
  EXPECT_EQ(d(2), 3.0);
}

}  // namespace
}  // namespace pilotsim
