// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// Downlink SINR: the Monte-Carlo use-and-then-forget estimator, the MRT and
// ZF closed forms, the large-array contamination limit, and rates.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pilotsim/channel.hpp"
#include "pilotsim/estimation.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/precoding.hpp"

namespace pilotsim {

/// All terms are received powers at the user (already scaled by rho_u).
struct SinrBreakdown {
  double desired = 0.0;
  double bf_uncertainty = 0.0;
  double coherent_pc = 0.0;
  double noncoherent = 0.0;
  double noise = 1.0;
  double sinr = 0.0;

  double interference_plus_noise() const {
    return bf_uncertainty + coherent_pc + noncoherent + noise;
  }
};

inline SinrBreakdown finish(SinrBreakdown b) {
  b.sinr = b.desired / b.interference_plus_noise();
  return b;
}

struct RateReport {
  double prelog = 1.0;
  std::vector<double> rates;  // bit/s/Hz per user

  double sum() const { return std::accumulate(rates.begin(), rates.end(), 0.0); }
  double mean() const { return rates.empty() ? 0.0 : sum() / static_cast<double>(rates.size()); }
};

inline constexpr std::size_t kMinSinrBlocks = 100;

/// Streaming accumulator of the effective gains h_ljk^H a_li seen by the
/// users of one cell. Blocks are folded in the order they are added.
class SinrAccumulator {
 public:
  SinrAccumulator(std::size_t cell, std::size_t num_cells, std::size_t users_per_cell)
      : cell_(cell),
        cells_(num_cells),
        users_(users_per_cell),
        own_sum_(users_per_cell, 0.0),
        power_(users_per_cell * num_cells * users_per_cell, 0.0) {}

  /// `precoders[l]` is the precoder of BS l; every BS transmits each vector
  /// with power rho_u.
  void add(const ChannelBlock& channels, std::span<const Precoder> precoders, double rho_u) {
    if (precoders.size() != cells_) throw std::invalid_argument("one precoder per BS expected");
    const double amp = std::sqrt(rho_u);
    for (std::size_t l = 0; l < cells_; ++l) {
      // gains(i, k) = a_li^H h_l,cell,k
      gains_.noalias() = precoders[l].a.adjoint() * channels.h.cell_block(l, cell_);
      for (std::size_t k = 0; k < users_; ++k) {
        for (std::size_t i = 0; i < users_; ++i)
          power_[(k * cells_ + l) * users_ + i] +=
              rho_u * std::norm(gains_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        if (l == cell_) {
          const auto g = std::conj(gains_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
          own_sum_[k] += amp * g;
        }
      }
    }
    ++blocks_;
  }

  std::size_t blocks() const { return blocks_; }
  std::size_t cell() const { return cell_; }

  /// Decomposition for user k of the accumulated cell under `plan`.
  SinrBreakdown breakdown(const PilotPlan& plan, std::size_t k, double noise_power = 1.0) const {
    if (blocks_ == 0) throw std::logic_error("no blocks accumulated");
    const double n = static_cast<double>(blocks_);
    SinrBreakdown b;
    const std::complex<double> mean = own_sum_[k] / n;
    const double own_power = power_[(k * cells_ + cell_) * users_ + k] / n;
    b.desired = std::norm(mean);
    b.bf_uncertainty = std::max(0.0, own_power - b.desired);
    for (std::size_t l = 0; l < cells_; ++l) {
      const std::size_t copilot = plan.copilot_user(l, cell_, k);
      for (std::size_t i = 0; i < users_; ++i) {
        if (l == cell_ && i == k) continue;
        const double p = power_[(k * cells_ + l) * users_ + i] / n;
        if (l != cell_ && i == copilot)
          b.coherent_pc += p;
        else
          b.noncoherent += p;
      }
    }
    b.noise = noise_power;
    return finish(b);
  }

 private:
  std::size_t cell_;
  std::size_t cells_;
  std::size_t users_;
  std::size_t blocks_ = 0;
  std::vector<std::complex<double>> own_sum_;  // sum of sqrt(rho_u) h_jjk^H a_jk
  std::vector<double> power_;  // [(k * L + l) * K + i]: sum of rho_u |h_ljk^H a_li|^2
  Eigen::MatrixXcd gains_;
};

/// One coherence block as seen by the SINR estimator.
struct BlockView {
  const ChannelBlock* channels = nullptr;
  const ChannelEstimates* estimates = nullptr;
  std::span<const Precoder> precoders;
};

/// Use-and-then-forget SINR of user (j, k) over a sequence of blocks.
inline SinrBreakdown empirical_sinr(std::span<const BlockView> blocks, const PowerPolicy& policy,
                                    const PilotPlan& plan, std::size_t j, std::size_t k,
                                    double noise_power = 1.0) {
  if (blocks.size() < kMinSinrBlocks)
    throw std::invalid_argument("empirical SINR needs at least " +
                                std::to_string(kMinSinrBlocks) + " blocks");
  SinrAccumulator acc(j, plan.num_cells, plan.users_per_cell);
  for (const BlockView& b : blocks) acc.add(*b.channels, b.precoders, policy.per_user_power());
  return acc.breakdown(plan, k, noise_power);
}

/// MRT closed form:
///   M g_jjk / (M sum_{l in C_jk, l != j} g_ljk + sum_l sum_i Psi_ljk + sigma^2 / rho_u).
inline SinrBreakdown closed_form_sinr_mrt(const EstimateVariance& var, const LsfTensor& psi,
                                          std::size_t antennas, const PilotPlan& plan,
                                          const PowerPolicy& policy, std::size_t j,
                                          std::size_t k, double noise_power = 1.0) {
  if (antennas < 1) throw std::invalid_argument("antenna count must be >= 1");
  const double rho_u = policy.per_user_power();
  const double m = static_cast<double>(antennas);
  const double users = static_cast<double>(psi.users_per_cell());
  SinrBreakdown b;
  b.desired = rho_u * m * var.gamma(j, j, k);
  for (std::size_t l : plan.copilot_cells(j, k))
    if (l != j) b.coherent_pc += rho_u * m * var.gamma(l, j, k);
  for (std::size_t l = 0; l < psi.num_cells(); ++l) b.noncoherent += rho_u * users * psi(l, j, k);
  b.noise = noise_power;
  return finish(b);
}

/// ZF closed form:
///   (M-K) g_jjk / ((M-K) sum_{l in C_jk, l != j} g_ljk
///                  + sum_l sum_i (Psi_ljk - g_ljk [l in C_jk]) + sigma^2 / rho_u).
/// A BS holding a co-pilot of (j, k) nulls toward its own estimates, which
/// span the estimated part of h_ljk, so only the error power Psi - g leaks
/// through each of its K vectors.
inline SinrBreakdown closed_form_sinr_zf(const EstimateVariance& var, const LsfTensor& psi,
                                         std::size_t antennas, const PilotPlan& plan,
                                         const PowerPolicy& policy, std::size_t j,
                                         std::size_t k, double noise_power = 1.0) {
  const std::size_t users = psi.users_per_cell();
  if (antennas <= users) throw std::invalid_argument("ZF closed form requires M > K");
  const double rho_u = policy.per_user_power();
  const double dof = static_cast<double>(antennas - users);
  const auto& copilot = plan.copilot_cells(j, k);
  SinrBreakdown b;
  b.desired = rho_u * dof * var.gamma(j, j, k);
  for (std::size_t l = 0; l < psi.num_cells(); ++l) {
    const bool shares = std::find(copilot.begin(), copilot.end(), l) != copilot.end();
    if (shares && l != j) b.coherent_pc += rho_u * dof * var.gamma(l, j, k);
    const double residual = psi(l, j, k) - (shares ? var.gamma(l, j, k) : 0.0);
    b.noncoherent += rho_u * static_cast<double>(users) * residual;
  }
  b.noise = noise_power;
  return finish(b);
}

inline SinrBreakdown closed_form_sinr(PrecoderKind kind, const EstimateVariance& var,
                                      const LsfTensor& psi, std::size_t antennas,
                                      const PilotPlan& plan, const PowerPolicy& policy,
                                      std::size_t j, std::size_t k, double noise_power = 1.0) {
  return kind == PrecoderKind::kMrt
             ? closed_form_sinr_mrt(var, psi, antennas, plan, policy, j, k, noise_power)
             : closed_form_sinr_zf(var, psi, antennas, plan, policy, j, k, noise_power);
}

/// M -> infinity limit g_jjk / sum_{l in C_jk, l != j} g_ljk; +infinity when
/// user (j, k) has no co-pilot outside its own cell.
inline double asymptotic_sinr(const EstimateVariance& var, const PilotPlan& plan, std::size_t j,
                              std::size_t k) {
  double contamination = 0.0;
  for (std::size_t l : plan.copilot_cells(j, k))
    if (l != j) contamination += var.gamma(l, j, k);
  if (contamination == 0.0) return std::numeric_limits<double>::infinity();
  return var.gamma(j, j, k) / contamination;
}

/// prelog * log2(1 + sinr).
inline double achievable_rate(double sinr, double prelog) {
  return prelog * std::log2(1.0 + sinr);
}

inline RateReport achievable_rate(std::span<const SinrBreakdown> sinrs,
                                  const OverheadReport& overhead) {
  RateReport r;
  r.prelog = overhead.prelog;
  r.rates.reserve(sinrs.size());
  for (const SinrBreakdown& s : sinrs) r.rates.push_back(achievable_rate(s.sinr, overhead.prelog));
  return r;
}

inline RateReport achievable_rate(const SinrBreakdown& sinr, const OverheadReport& overhead) {
  return achievable_rate(std::span<const SinrBreakdown>(&sinr, 1), overhead);
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace pilotsim
