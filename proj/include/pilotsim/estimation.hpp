// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// Linear MMSE channel estimation from the contaminated pilot observation,
// given perfect knowledge of the large-scale fading.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pilotsim/channel.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/scenario.hpp"

namespace pilotsim {

struct EstimateVariance {
  LsfTensor gamma;       // per-antenna variance of hat h_ljk
  LsfTensor cross_gain;  // O_ljk = rho_p Y_p Psi_jjk Psi_ljk / (1 + rho_p Y_p S_l,p)
};

struct ChannelEstimates {
  VectorField h_hat;
  std::vector<bool> available;  // [(l * L + j) * K + k]

  bool has(std::size_t l, std::size_t j, std::size_t k) const {
    return available[(l * h_hat.num_cells() + j) * h_hat.users_per_cell() + k];
  }
};

/// Per-user normalized estimation error, indexed like LsfTensor.
struct NmseReport {
  LsfTensor nmse;
};

/// 1 + rho_p Y_p * sum of Psi_l,j',k' over the users (j', k') holding pilot p:
/// the per-antenna power of xi_{l,p}.
inline double observation_power(const LsfTensor& psi, const PilotPlan& plan, double pilot_snr,
                                std::size_t l, std::size_t p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < plan.num_cells; ++j) {
    const std::size_t k = plan.holder(j, p);
    if (k != PilotPlan::npos) sum += psi(l, j, k);
  }
  return 1.0 + pilot_snr * static_cast<double>(plan.pilot_length) * sum;
}

inline EstimateVariance estimate_variance(const LsfTensor& psi, const PilotPlan& plan,
                                          double pilot_snr) {
  const std::size_t cells = psi.num_cells();
  const std::size_t users = psi.users_per_cell();
  if (plan.num_cells != cells || plan.users_per_cell != users)
    throw std::invalid_argument("pilot plan does not match the large-scale tensor");
  const double energy = pilot_snr * static_cast<double>(plan.pilot_length);
  EstimateVariance v{LsfTensor(cells, users), LsfTensor(cells, users)};
  for (std::size_t l = 0; l < cells; ++l)
    for (std::size_t j = 0; j < cells; ++j)
      for (std::size_t k = 0; k < users; ++k) {
        const double denom = observation_power(psi, plan, pilot_snr, l, plan.pilot(j, k));
        v.gamma(l, j, k) = energy * psi(l, j, k) * psi(l, j, k) / denom;
        v.cross_gain(l, j, k) = energy * psi(j, j, k) * psi(l, j, k) / denom;
      }
  return v;
}

/// hat h_ljk = sqrt(rho_p Y_p) Psi_ljk / (1 + rho_p Y_p S_l,p) * xi_{l,p}.
/// Estimates whose observation is not present are left at zero and marked
/// unavailable.
inline ChannelEstimates estimate_channels(const TrainingObservation& obs, const LsfTensor& psi,
                                          const PilotPlan& plan) {
  const std::size_t cells = psi.num_cells();
  const std::size_t users = psi.users_per_cell();
  if (plan.num_cells != cells || plan.users_per_cell != users ||
      obs.pilot_length != plan.pilot_length || obs.xi.size() != cells)
    throw std::invalid_argument("training observation was not produced under this pilot plan");

  const auto antennas = static_cast<std::size_t>(obs.xi.front().rows());
  const double energy = obs.pilot_snr * static_cast<double>(plan.pilot_length);
  ChannelEstimates est{VectorField(antennas, cells, users),
                       std::vector<bool>(cells * cells * users, false)};
  for (std::size_t l = 0; l < cells; ++l) {
    for (std::size_t j = 0; j < cells; ++j)
      for (std::size_t k = 0; k < users; ++k) {
        const std::size_t p = plan.pilot(j, k);
        if (!obs.has(l, p)) continue;
        const double coef = std::sqrt(energy) * psi(l, j, k) /
                            observation_power(psi, plan, obs.pilot_snr, l, p);
        est.h_hat.vec(l, j, k) = coef * obs.xi[l].col(static_cast<Eigen::Index>(p));
        est.available[(l * cells + j) * users + k] = true;
      }
  }
  return est;
}

/// Accumulates ||hat h - h||^2 and ||h||^2 per link over coherence blocks.
class NmseAccumulator {
 public:
  void add(const ChannelEstimates& est, const ChannelBlock& channels) {
    const VectorField& h = channels.h;
    const std::size_t cells = h.num_cells();
    const std::size_t users = h.users_per_cell();
    if (error_.empty()) {
      cells_ = cells;
      users_ = users;
      error_.assign(cells * cells * users, 0.0);
      energy_.assign(cells * cells * users, 0.0);
    }
    if (cells != cells_ || users != users_ || est.h_hat.num_cells() != cells)
      throw std::invalid_argument("estimate and channel dimensions differ");
    for (std::size_t l = 0; l < cells; ++l)
      for (std::size_t j = 0; j < cells; ++j)
        for (std::size_t k = 0; k < users; ++k) {
          const std::size_t idx = (l * cells + j) * users + k;
          error_[idx] += (est.h_hat.vec(l, j, k) - h.vec(l, j, k)).squaredNorm();
          energy_[idx] += h.vec(l, j, k).squaredNorm();
        }
  }

  NmseReport result() const {
    NmseReport r{LsfTensor(cells_, users_)};
    for (std::size_t l = 0; l < cells_; ++l)
      for (std::size_t j = 0; j < cells_; ++j)
        for (std::size_t k = 0; k < users_; ++k) {
          const std::size_t idx = (l * cells_ + j) * users_ + k;
          r.nmse(l, j, k) = energy_[idx] > 0.0 ? error_[idx] / energy_[idx] : 0.0;
        }
    return r;
  }

 private:
  std::size_t cells_ = 0;
  std::size_t users_ = 0;
  std::vector<double> error_;
  std::vector<double> energy_;
};

/// Single-block NMSE.
inline NmseReport estimation_nmse(const ChannelEstimates& est, const ChannelBlock& channels) {
  NmseAccumulator acc;
  acc.add(est, channels);
  return acc.result();
}

/// Analytic NMSE (Psi - gamma) / Psi.
inline LsfTensor analytic_nmse(const EstimateVariance& v, const LsfTensor& psi) {
  LsfTensor out(psi.num_cells(), psi.users_per_cell());
  for (std::size_t l = 0; l < psi.num_cells(); ++l)
    for (std::size_t j = 0; j < psi.num_cells(); ++j)
      for (std::size_t k = 0; k < psi.users_per_cell(); ++k)
        out(l, j, k) = (psi(l, j, k) - v.gamma(l, j, k)) / psi(l, j, k);
  return out;
}

}  // namespace pilotsim
