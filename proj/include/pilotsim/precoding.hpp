// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "pilotsim/errors.hpp"
#include "pilotsim/estimation.hpp"

namespace pilotsim {

enum class PrecoderKind { kMrt, kZf };

inline std::string to_string(PrecoderKind kind) { return kind == PrecoderKind::kMrt ? "mrt" : "zf"; }

inline PrecoderKind parse_precoder(const std::string& text) {
  if (text == "mrt") return PrecoderKind::kMrt;
  if (text == "zf") return PrecoderKind::kZf;
  throw std::invalid_argument("unknown precoder '" + text + "' (expected mrt or zf)");
}

/// Unit-norm precoding vectors of one BS, one column per served user, and the
/// transmit power allotted to each.
struct Precoder {
  Eigen::MatrixXcd a;
  double per_user_power = 1.0;
};

struct PowerPolicy {
  double rho_d = 1.0;        // total downlink power per BS
  std::size_t users = 1;

  double per_user_power() const { return rho_d / static_cast<double>(users); }
};

/// Condition number above which the ZF Gram matrix is treated as singular.
inline constexpr double kZfMaxCondition = 1e12;

/// Columns of `own` (M x K, the BS's estimates of its own users) normalized.
inline Precoder mrt_precoder(const Eigen::MatrixXcd& own) {
  Precoder out{own, 1.0};
  for (Eigen::Index k = 0; k < own.cols(); ++k) {
    const double norm = own.col(k).norm();
    if (!(norm > 0.0))
      throw NumericalError("MRT: zero channel estimate for user " + std::to_string(k));
    out.a.col(k) /= norm;
  }
  return out;
}

/// Columns of own (own^H own)^{-1}, each normalized to unit norm.
inline Precoder zf_precoder(const Eigen::MatrixXcd& own) {
  const Eigen::Index antennas = own.rows();
  const Eigen::Index users = own.cols();
  if (antennas <= users)
    throw std::invalid_argument("ZF requires more antennas (" + std::to_string(antennas) +
                                ") than users (" + std::to_string(users) + ")");
  const Eigen::MatrixXcd gram = own.adjoint() * own;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kZfMaxCondition)
    throw NumericalError("ZF: estimate Gram matrix is rank deficient (condition number " +
                         std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) + ")");
  Precoder out{own * gram.llt().solve(Eigen::MatrixXcd::Identity(users, users)), 1.0};
  out.a.colwise().normalize();
  return out;
}

inline Eigen::MatrixXcd own_estimates(const ChannelEstimates& est, std::size_t cell) {
  const std::size_t users = est.h_hat.users_per_cell();
  for (std::size_t k = 0; k < users; ++k)
    if (!est.has(cell, cell, k))
      throw std::invalid_argument("estimate of user " + std::to_string(k) + " of cell " +
                                  std::to_string(cell) + " is not available");
  return est.h_hat.cell_block(cell, cell);
}

inline Precoder mrt_precoder(const ChannelEstimates& est, std::size_t cell) {
  return mrt_precoder(own_estimates(est, cell));
}

inline Precoder zf_precoder(const ChannelEstimates& est, std::size_t cell) {
  return zf_precoder(own_estimates(est, cell));
}

inline Precoder make_precoder(PrecoderKind kind, const Eigen::MatrixXcd& own) {
  return kind == PrecoderKind::kMrt ? mrt_precoder(own) : zf_precoder(own);
}

/// Equal power split: every vector is transmitted with rho_d / K.
inline Precoder apply_power_policy(Precoder precoder, const PowerPolicy& policy) {
  if (!(policy.rho_d >= 0.0) || policy.users == 0)
    throw std::invalid_argument("invalid power policy");
  precoder.per_user_power = policy.per_user_power();
  return precoder;
}

/// Total radiated power of one BS: sum_k rho_u * ||a_k||^2.
inline double radiated_power(const Precoder& precoder) {
  return precoder.per_user_power * precoder.a.colwise().squaredNorm().sum();
}

}  // namespace pilotsim
