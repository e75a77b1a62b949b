// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// Hexagonal multi-cell geometry, user drops and large-scale fading.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pilotsim/random.hpp"

namespace pilotsim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Propagation constants. Gains are normalized so that a user at the cell
/// radius of its serving base station, without shadowing, sees `edge_snr_db`
/// of downlink SNR against unit noise power.
struct PathlossParams {
  double cell_radius = 500.0;       // m
  double min_distance = 35.0;       // m
  double pathloss_exponent = 3.8;
  double shadowing_sigma_db = 8.0;
  double edge_snr_db = 10.0;

  void validate() const {
    if (!(min_distance > 0.0))
      throw std::invalid_argument("min_distance must be positive");
    if (!(cell_radius > min_distance))
      throw std::invalid_argument("cell_radius must exceed min_distance");
    if (!(pathloss_exponent > 2.0))
      throw std::invalid_argument("pathloss_exponent must exceed 2");
    if (!(shadowing_sigma_db >= 0.0))
      throw std::invalid_argument("shadowing_sigma_db must be non-negative");
  }
};

/// Base station positions. Cells are flat-topped hexagons with circumradius
/// `cell_radius`; neighbouring centers are sqrt(3) * cell_radius apart.
struct CellLayout {
  double cell_radius = 0.0;
  std::vector<Point> centers;

  std::size_t num_cells() const { return centers.size(); }

  /// True iff cells a and b share a hexagon edge.
  bool adjacent(std::size_t a, std::size_t b) const {
    if (a == b) return false;
    const double d = distance(centers[a], centers[b]);
    return std::abs(d - std::sqrt(3.0) * cell_radius) < 1e-6 * cell_radius;
  }

  /// Point-in-hexagon test for cell `cell`.
  bool contains(std::size_t cell, const Point& p) const {
    const double x = std::abs(p.x - centers[cell].x);
    const double y = std::abs(p.y - centers[cell].y);
    const double s3 = std::sqrt(3.0);
    return y <= 0.5 * s3 * cell_radius && s3 * x + y <= s3 * cell_radius;
  }
};

/// User positions, indexed by (serving cell j, user k).
struct UserDrop {
  std::size_t users_per_cell = 0;
  std::vector<Point> positions;

  std::size_t num_cells() const {
    return users_per_cell == 0 ? 0 : positions.size() / users_per_cell;
  }
  const Point& at(std::size_t j, std::size_t k) const {
    return positions[j * users_per_cell + k];
  }
};

/// Large-scale fading gains Psi[l][j][k] between base station l and user k of
/// cell j, in linear power units.
class LsfTensor {
 public:
  LsfTensor() = default;
  LsfTensor(std::size_t num_cells, std::size_t users_per_cell, double fill = 0.0)
      : cells_(num_cells),
        users_(users_per_cell),
        data_(num_cells * num_cells * users_per_cell, fill) {}

  std::size_t num_cells() const { return cells_; }
  std::size_t users_per_cell() const { return users_; }

  double& operator()(std::size_t l, std::size_t j, std::size_t k) {
    return data_[(l * cells_ + j) * users_ + k];
  }
  double operator()(std::size_t l, std::size_t j, std::size_t k) const {
    return data_[(l * cells_ + j) * users_ + k];
  }

  /// Diagonal of D_lj: square-root gains from BS l to the users of cell j.
  Eigen::VectorXd sqrt_gains(std::size_t l, std::size_t j) const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(users_));
    for (std::size_t k = 0; k < users_; ++k)
      d(static_cast<Eigen::Index>(k)) = std::sqrt((*this)(l, j, k));
    return d;
  }

  const std::vector<double>& values() const { return data_; }

 private:
  std::size_t cells_ = 0;
  std::size_t users_ = 0;
  std::vector<double> data_;
};

/// Deterministic layout: one cell, three mutually adjacent cells, or a center
/// cell with its first ring of six neighbours (cell 0 is always the center).
inline CellLayout build_layout(std::size_t num_cells, const PathlossParams& params) {
  params.validate();
  CellLayout layout;
  layout.cell_radius = params.cell_radius;
  layout.centers.push_back({0.0, 0.0});
  const double spacing = std::sqrt(3.0) * params.cell_radius;
  auto ring_center = [&](int n) {
    const double angle = std::numbers::pi / 6.0 + n * std::numbers::pi / 3.0;
    return Point{spacing * std::cos(angle), spacing * std::sin(angle)};
  };
  switch (num_cells) {
    case 1:
      break;
    case 3:
      layout.centers.push_back(ring_center(0));
      layout.centers.push_back(ring_center(1));
      break;
    case 7:
      for (int n = 0; n < 6; ++n) layout.centers.push_back(ring_center(n));
      break;
    default:
      throw std::invalid_argument("unsupported number of cells " +
                                  std::to_string(num_cells) +
                                  " (supported: 1, 3, 7)");
  }
  return layout;
}

/// Drops `users_per_cell` users uniformly in every hexagon by rejection
/// sampling from the bounding box. Draws closer than min_distance to any
/// base station are rejected.
inline UserDrop drop_users(const CellLayout& layout, std::size_t users_per_cell,
                           const PathlossParams& params, Rng& rng) {
  if (users_per_cell < 1) throw std::invalid_argument("users_per_cell must be >= 1");
  if (params.min_distance >= params.cell_radius)
    throw std::invalid_argument(
        "min_distance must be smaller than cell_radius for user placement");
  const double r = layout.cell_radius;
  const double half_height = 0.5 * std::sqrt(3.0) * r;

  UserDrop drop;
  drop.users_per_cell = users_per_cell;
  drop.positions.reserve(layout.num_cells() * users_per_cell);
  for (std::size_t j = 0; j < layout.num_cells(); ++j) {
    const Point& c = layout.centers[j];
    for (std::size_t k = 0; k < users_per_cell; ++k) {
      for (;;) {
        const Point p{c.x + rng.uniform(-r, r), c.y + rng.uniform(-half_height, half_height)};
        if (!layout.contains(j, p)) continue;
        bool too_close = false;
        for (const Point& bs : layout.centers)
          too_close = too_close || distance(bs, p) < params.min_distance;
        if (too_close) continue;
        drop.positions.push_back(p);
        break;
      }
    }
  }
  return drop;
}

/// Gain normalization constant: Psi at distance cell_radius without shadowing.
inline double reference_gain(const PathlossParams& params, double dl_power,
                             double noise_power = 1.0) {
  return std::pow(10.0, params.edge_snr_db / 10.0) * noise_power / dl_power;
}

/// Psi_ljk = c0 * z_ljk * (r_ljk / cell_radius)^(-exponent), with z_ljk
/// log-normal of standard deviation shadowing_sigma_db.
inline LsfTensor compute_large_scale_fading(const CellLayout& layout, const UserDrop& drop,
                                            const PathlossParams& params, Rng& rng,
                                            double dl_power = 1.0,
                                            double noise_power = 1.0) {
  const std::size_t num_cells = layout.num_cells();
  const std::size_t users = drop.users_per_cell;
  if (drop.num_cells() != num_cells)
    throw std::invalid_argument("user drop and layout disagree on the number of cells");
  if (!(dl_power > 0.0)) throw std::invalid_argument("downlink power must be positive");

  const double c0 = reference_gain(params, dl_power, noise_power);
  LsfTensor psi(num_cells, users);
  for (std::size_t l = 0; l < num_cells; ++l)
    for (std::size_t j = 0; j < num_cells; ++j)
      for (std::size_t k = 0; k < users; ++k) {
        const double rel = distance(layout.centers[l], drop.at(j, k)) / params.cell_radius;
        double gain = c0 * std::pow(rel, -params.pathloss_exponent);
        if (params.shadowing_sigma_db > 0.0)
          gain *= std::pow(10.0, params.shadowing_sigma_db * rng.normal() / 10.0);
        psi(l, j, k) = gain;
      }
  return psi;
}

}  // namespace pilotsim
