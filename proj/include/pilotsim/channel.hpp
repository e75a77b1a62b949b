// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// Small-scale fading, instantaneous channels and the despread uplink
// training observation.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pilotsim/pilots.hpp"
#include "pilotsim/random.hpp"
#include "pilotsim/scenario.hpp"

namespace pilotsim {

/// Per-BS stacks of length-M vectors for every user in the network. Column
/// j * K + k of `at(l)` is the vector between BS l and user k of cell j.
class VectorField {
 public:
  VectorField() = default;
  VectorField(std::size_t antennas, std::size_t num_cells, std::size_t users_per_cell)
      : VectorField(antennas, num_cells, users_per_cell, false) {
    for (auto& m : per_bs_) m.setZero();
  }

  /// Same shape, entries left unset.
  static VectorField uninitialized(std::size_t antennas, std::size_t num_cells,
                                   std::size_t users_per_cell) {
    return VectorField(antennas, num_cells, users_per_cell, false);
  }

  std::size_t antennas() const { return antennas_; }
  std::size_t num_cells() const { return cells_; }
  std::size_t users_per_cell() const { return users_; }

  Eigen::MatrixXcd& at(std::size_t l) { return per_bs_[l]; }
  const Eigen::MatrixXcd& at(std::size_t l) const { return per_bs_[l]; }

  auto vec(std::size_t l, std::size_t j, std::size_t k) {
    return per_bs_[l].col(static_cast<Eigen::Index>(j * users_ + k));
  }
  auto vec(std::size_t l, std::size_t j, std::size_t k) const {
    return per_bs_[l].col(static_cast<Eigen::Index>(j * users_ + k));
  }
  /// The K vectors between BS l and the users of cell j, as an M x K block.
  auto cell_block(std::size_t l, std::size_t j) const {
    return per_bs_[l].middleCols(static_cast<Eigen::Index>(j * users_),
                                 static_cast<Eigen::Index>(users_));
  }

 private:
  VectorField(std::size_t antennas, std::size_t num_cells, std::size_t users_per_cell, bool)
      : antennas_(antennas), cells_(num_cells), users_(users_per_cell), per_bs_(num_cells) {
    for (auto& m : per_bs_)
      m.resize(static_cast<Eigen::Index>(antennas),
               static_cast<Eigen::Index>(num_cells * users_per_cell));
  }

  std::size_t antennas_ = 0;
  std::size_t cells_ = 0;
  std::size_t users_ = 0;
  std::vector<Eigen::MatrixXcd> per_bs_;
};

/// Theta_ljk: i.i.d. CN(0, 1) entries.
struct SmallScaleBlock {
  VectorField theta;
};

/// h_ljk = sqrt(Psi_ljk) * Theta_ljk.
struct ChannelBlock {
  VectorField h;
};

/// Despread pilot observations xi_{l,p}: column p of `xi[l]`. Observations
/// outside the requested scope are left at zero with `present` false.
struct TrainingObservation {
  std::size_t pilot_length = 0;
  double pilot_snr = 0.0;    // rho_p
  double noise_power = 1.0;  // per-entry variance of the despread noise
  std::vector<Eigen::MatrixXcd> xi;
  std::vector<bool> present;  // [l * Y_p + p]

  bool has(std::size_t l, std::size_t p) const { return present[l * pilot_length + p]; }
};

enum class TrainingScope {
  kAllPilots,      // every (BS, pilot) pair
  kServingPilots,  // at BS l, only the pilots held by users of cell l
};

inline SmallScaleBlock draw_small_scale(std::size_t antennas, std::size_t num_cells,
                                        std::size_t users_per_cell, Rng& rng) {
  if (antennas < 1) throw std::invalid_argument("antenna count must be >= 1");
  SmallScaleBlock block{VectorField::uninitialized(antennas, num_cells, users_per_cell)};
  for (std::size_t l = 0; l < num_cells; ++l) rng.fill_complex_normal(block.theta.at(l));
  return block;
}

inline ChannelBlock synthesize_channel(SmallScaleBlock small, const LsfTensor& psi) {
  if (small.theta.num_cells() != psi.num_cells() ||
      small.theta.users_per_cell() != psi.users_per_cell())
    throw std::invalid_argument("small-scale block and large-scale tensor dimensions differ");
  ChannelBlock out{std::move(small.theta)};
  for (std::size_t l = 0; l < psi.num_cells(); ++l)
    for (std::size_t j = 0; j < psi.num_cells(); ++j)
      for (std::size_t k = 0; k < psi.users_per_cell(); ++k)
        out.h.vec(l, j, k) *= std::sqrt(psi(l, j, k));
  return out;
}

/// xi_{l,p} = sqrt(rho_p * Y_p) * sum over users (j, k) holding pilot p of
/// h_ljk, plus CN(0, 1) noise. Noise is drawn in (l, p) order over the pilots
/// in scope.
inline TrainingObservation uplink_training(const ChannelBlock& channels, const PilotPlan& plan,
                                           double pilot_snr, Rng& rng,
                                           TrainingScope scope = TrainingScope::kAllPilots) {
  const VectorField& h = channels.h;
  const std::size_t cells = h.num_cells();
  const std::size_t users = h.users_per_cell();
  if (plan.num_cells != cells || plan.users_per_cell != users)
    throw std::invalid_argument("pilot plan does not match the channel dimensions");
  for (std::size_t p : plan.pilot_index)
    if (p >= plan.pilot_length) throw std::out_of_range("pilot index out of range");
  if (!(pilot_snr >= 0.0)) throw std::invalid_argument("pilot SNR must be non-negative");

  const auto rows = static_cast<Eigen::Index>(h.antennas());
  const double gain = std::sqrt(pilot_snr * static_cast<double>(plan.pilot_length));

  TrainingObservation obs;
  obs.pilot_length = plan.pilot_length;
  obs.pilot_snr = pilot_snr;
  obs.xi.resize(cells);
  for (auto& m : obs.xi) m.setZero(rows, static_cast<Eigen::Index>(plan.pilot_length));
  obs.present.assign(cells * plan.pilot_length, false);

  Eigen::VectorXcd noise(rows);
  for (std::size_t l = 0; l < cells; ++l) {
    for (std::size_t p = 0; p < plan.pilot_length; ++p) {
      if (scope == TrainingScope::kServingPilots && plan.holder(l, p) == PilotPlan::npos) continue;
      auto column = obs.xi[l].col(static_cast<Eigen::Index>(p));
      for (std::size_t j = 0; j < cells; ++j) {
        const std::size_t k = plan.holder(j, p);
        if (k != PilotPlan::npos) column += h.vec(l, j, k);
      }
      column *= gain;
      rng.fill_complex_normal(noise);
      column += noise;
      obs.present[l * plan.pilot_length + p] = true;
    }
  }
  return obs;
}

}  // namespace pilotsim
