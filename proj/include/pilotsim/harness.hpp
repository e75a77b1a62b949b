// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// Monte-Carlo driver: one trial per geometry drop, sweeps over the antenna
// count, the pilot reuse factor or the grouping parameter, and aggregation
// into a result table.
//
// Every random stream is keyed by its coordinates:
//   geometry  (seed, drop)
//   fading    (seed, drop, M)
//   training  (seed, drop, M, scheme)
// so results never depend on thread count, sweep order, or which other
// values share the sweep.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "pilotsim/channel.hpp"
#include "pilotsim/config.hpp"
#include "pilotsim/estimation.hpp"
#include "pilotsim/metrics.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/precoding.hpp"
#include "pilotsim/random.hpp"
#include "pilotsim/scenario.hpp"

namespace pilotsim {

namespace stream {
inline constexpr std::uint64_t kGeometry = 1;
inline constexpr std::uint64_t kFading = 2;
inline constexpr std::uint64_t kTraining = 3;
}  // namespace stream

inline std::uint64_t scheme_key(const PilotScheme& s) {
  return s.kind == PilotScheme::Kind::kReuse ? mix64(s.reuse_factor)
                                             : mix64(0x67726f7570ULL ^ key_of(s.tau));
}

struct UserOutcome {
  std::size_t cell = 0;
  std::size_t user = 0;
  bool edge = false;  // by the grouping rule at the scheme's (or config's) tau
  SinrBreakdown empirical;
  SinrBreakdown closed_form;
  double asymptotic_sinr = 0.0;
  double rate = 0.0;              // from the empirical SINR
  double closed_form_rate = 0.0;
};

struct PrecoderOutcome {
  PrecoderKind kind = PrecoderKind::kMrt;
  std::vector<UserOutcome> users;

  double mean_rate() const {
    double s = 0.0;
    for (const auto& u : users) s += u.rate;
    return users.empty() ? 0.0 : s / static_cast<double>(users.size());
  }
  double mean_sinr() const {
    double s = 0.0;
    for (const auto& u : users) s += u.empirical.sinr;
    return users.empty() ? 0.0 : s / static_cast<double>(users.size());
  }
  const UserOutcome& user(std::size_t cell, std::size_t k) const {
    for (const auto& u : users)
      if (u.cell == cell && u.user == k) return u;
    throw std::out_of_range("user not measured");
  }
};

struct SchemeOutcome {
  PilotScheme scheme;
  Grouping grouping;
  PilotPlan plan;
  OverheadReport overhead;
  EstimateVariance variance;
  std::vector<PrecoderOutcome> precoders;

  const PrecoderOutcome& precoder(PrecoderKind kind) const {
    for (const auto& p : precoders)
      if (p.kind == kind) return p;
    throw std::out_of_range("precoder not simulated");
  }
};

struct TrialResult {
  std::size_t drop_index = 0;
  CellLayout layout;
  UserDrop users;
  LsfTensor psi;
  std::vector<SchemeOutcome> schemes;

  const SchemeOutcome& scheme(const PilotScheme& s) const {
    for (const auto& o : schemes)
      if (o.scheme == s) return o;
    throw std::out_of_range("scheme not simulated: " + s.label());
  }
};

inline std::vector<std::size_t> measured_cells(const SimConfig& cfg) {
  std::vector<std::size_t> out;
  const std::size_t n = cfg.measure == MeasuredCells::kAll ? cfg.cells : 1;
  for (std::size_t c = 0; c < n; ++c) out.push_back(c);
  return out;
}

/// One geometry drop with `cfg.blocks` coherence blocks. All configured
/// schemes and precoders see the same small-scale fading.
inline TrialResult run_trial(const SimConfig& cfg, std::size_t drop_index) {
  cfg.validate();
  const std::size_t cells = cfg.cells;
  const std::size_t users = cfg.users_per_cell;
  const double rho_p = cfg.pilot_snr();
  const PowerPolicy policy{cfg.dl_power(), users};

  TrialResult result;
  result.drop_index = drop_index;
  Rng geometry(derive_seed(cfg.seed, {stream::kGeometry, drop_index}));
  result.layout = build_layout(cells, cfg.pathloss);
  result.users = drop_users(result.layout, users, cfg.pathloss, geometry);
  result.psi = compute_large_scale_fading(result.layout, result.users, cfg.pathloss, geometry,
                                          policy.rho_d, cfg.noise_power);
  const QualityVector quality = channel_quality(result.psi);
  const Grouping reference_grouping = group_users(quality, cfg.tau);

  const auto measured = measured_cells(cfg);
  std::vector<Rng> training;
  // accumulators[s][p][c]
  std::vector<std::vector<std::vector<SinrAccumulator>>> accumulators;
  for (const PilotScheme& scheme : cfg.schemes) {
    SchemeOutcome o;
    o.scheme = scheme;
    o.grouping = scheme.kind == PilotScheme::Kind::kGrouping ? group_users(quality, scheme.tau)
                                                             : reference_grouping;
    o.plan = assign_pilots(o.grouping, scheme, result.layout);
    o.overhead = pilot_overhead(o.plan, cfg.coherence_symbols);
    o.variance = estimate_variance(result.psi, o.plan, rho_p);
    result.schemes.push_back(std::move(o));
    training.emplace_back(derive_seed(
        cfg.seed, {stream::kTraining, drop_index, cfg.antennas, scheme_key(scheme)}));
    accumulators.emplace_back();
    for (std::size_t p = 0; p < cfg.precoders.size(); ++p) {
      accumulators.back().emplace_back();
      for (std::size_t c : measured) accumulators.back().back().emplace_back(c, cells, users);
    }
  }

  Rng fading(derive_seed(cfg.seed, {stream::kFading, drop_index, cfg.antennas}));
  std::vector<Precoder> precoders(cells);
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const ChannelBlock channels =
        synthesize_channel(draw_small_scale(cfg.antennas, cells, users, fading), result.psi);
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
      const PilotPlan& plan = result.schemes[s].plan;
      const TrainingObservation obs =
          uplink_training(channels, plan, rho_p, training[s], TrainingScope::kServingPilots);
      const ChannelEstimates est = estimate_channels(obs, result.psi, plan);
      for (std::size_t p = 0; p < cfg.precoders.size(); ++p) {
        for (std::size_t l = 0; l < cells; ++l)
          precoders[l] = apply_power_policy(make_precoder(cfg.precoders[p], own_estimates(est, l)),
                                            policy);
        for (auto& acc : accumulators[s][p]) acc.add(channels, precoders, policy.per_user_power());
      }
    }
  }

  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    SchemeOutcome& o = result.schemes[s];
    for (std::size_t p = 0; p < cfg.precoders.size(); ++p) {
      PrecoderOutcome po;
      po.kind = cfg.precoders[p];
      for (const SinrAccumulator& acc : accumulators[s][p]) {
        const std::size_t j = acc.cell();
        for (std::size_t k = 0; k < users; ++k) {
          UserOutcome u;
          u.cell = j;
          u.user = k;
          u.edge = o.grouping.is_edge(j, k);
          u.empirical = acc.breakdown(o.plan, k, cfg.noise_power);
          u.closed_form = closed_form_sinr(po.kind, o.variance, result.psi, cfg.antennas, o.plan,
                                           policy, j, k, cfg.noise_power);
          u.asymptotic_sinr = asymptotic_sinr(o.variance, o.plan, j, k);
          u.rate = achievable_rate(u.empirical.sinr, o.overhead.prelog);
          u.closed_form_rate = achievable_rate(u.closed_form.sinr, o.overhead.prelog);
          po.users.push_back(u);
        }
      }
      o.precoders.push_back(std::move(po));
    }
  }
  return result;
}

enum class SweepVariable { kAntennas, kReuse, kTau };

inline std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::kAntennas: return "m";
    case SweepVariable::kReuse: return "reuse";
    case SweepVariable::kTau: return "tau";
  }
  return "?";
}

inline SweepVariable parse_sweep_variable(const std::string& text) {
  if (text == "m") return SweepVariable::kAntennas;
  if (text == "reuse") return SweepVariable::kReuse;
  if (text == "tau") return SweepVariable::kTau;
  throw ConfigError("--var: expected m, reuse or tau, got '" + text + "'");
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::kAntennas;
  std::vector<double> values;

  void validate() const {
    if (values.empty()) throw ConfigError("--values: sweep needs at least one value");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1]))
        throw ConfigError("--values: sweep values must be strictly increasing");
    if (variable != SweepVariable::kTau)
      for (double v : values)
        if (!(v >= 1.0) || v != std::floor(v))
          throw ConfigError("--values: " + to_string(variable) +
                            " values must be positive integers");
  }
};

struct ResultRow {
  std::string sweep_var;
  double value = 0.0;
  std::string scheme;
  std::string precoder;
  double mean_rate = 0.0;     // bit/s/Hz, empirical SINR
  double mean_sinr_db = 0.0;  // 10 log10 of the mean linear SINR
  double ci95 = 0.0;          // half-width over per-drop mean rates
  std::size_t drops = 0;
  std::size_t blocks = 0;     // per drop
  std::vector<double> drop_rates;

  auto sort_key() const { return std::tie(value, scheme, precoder); }
};

struct ResultTable {
  std::vector<ResultRow> rows;

  void sort() {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ResultRow& a, const ResultRow& b) { return a.sort_key() < b.sort_key(); });
  }
  const ResultRow* find(double value, const std::string& scheme, const std::string& precoder) const {
    for (const auto& r : rows)
      if (r.value == value && r.scheme == scheme && r.precoder == precoder) return &r;
    return nullptr;
  }
};

/// Runs `task(i)` for i in [0, count) on `threads` workers. The first
/// exception by index is rethrown after all workers finish.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

inline ResultRow aggregate(std::string sweep_var, double value, std::string scheme,
                           std::string precoder, const std::vector<double>& drop_rates,
                           const std::vector<double>& drop_sinrs, std::size_t blocks) {
  ResultRow row;
  row.sweep_var = std::move(sweep_var);
  row.value = value;
  row.scheme = std::move(scheme);
  row.precoder = std::move(precoder);
  row.drops = drop_rates.size();
  row.blocks = blocks;
  row.drop_rates = drop_rates;
  const double n = static_cast<double>(row.drops);
  double sum = 0.0;
  double sinr_sum = 0.0;
  for (std::size_t d = 0; d < row.drops; ++d) {
    sum += drop_rates[d];
    sinr_sum += drop_sinrs[d];
  }
  row.mean_rate = sum / n;
  row.mean_sinr_db = to_db(sinr_sum / n);
  if (row.drops > 1) {
    double ss = 0.0;
    for (double r : drop_rates) ss += (r - row.mean_rate) * (r - row.mean_rate);
    row.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return row;
}

/// Runs every drop of `cfg` and appends one row per (variant, precoder).
/// `labels[s]` and `values[s]` name the row of the s-th configured scheme.
inline void run_drops(const SimConfig& cfg, const std::string& sweep_var,
                      const std::vector<std::string>& labels, const std::vector<double>& values,
                      std::size_t threads, ResultTable& table) {
  std::vector<TrialResult> trials(cfg.drops);
  parallel_for(cfg.drops, threads, [&](std::size_t d) { trials[d] = run_trial(cfg, d); });
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s)
    for (std::size_t p = 0; p < cfg.precoders.size(); ++p) {
      std::vector<double> rates, sinrs;
      for (const TrialResult& t : trials) {
        const PrecoderOutcome& po = t.schemes[s].precoders[p];
        rates.push_back(po.mean_rate());
        sinrs.push_back(po.mean_sinr());
      }
      table.rows.push_back(aggregate(sweep_var, values[s], labels[s],
                                     to_string(cfg.precoders[p]), rates, sinrs, cfg.blocks));
    }
}

}  // namespace detail

/// Aggregates `cfg.drops` trials per sweep value.
///   m      one run per antenna count;
///   reuse  all reuse factors share each drop's fading (scheme column "reuse");
///   tau    grouping schemes take each tau; reuse schemes are repeated as-is.
inline ResultTable run_sweep(const SimConfig& cfg, const SweepSpec& spec, std::size_t threads = 0) {
  spec.validate();
  cfg.validate();
  ResultTable table;
  const std::string var = to_string(spec.variable);
  switch (spec.variable) {
    case SweepVariable::kAntennas:
      for (double v : spec.values) {
        SimConfig c = cfg;
        c.antennas = static_cast<std::size_t>(v);
        try {
          c.validate();
        } catch (const ConfigError& e) {
          throw ConfigError(std::string("--values: M = ") + std::to_string(c.antennas) + ": " + e.what());
        }
        std::vector<std::string> labels;
        for (const auto& s : c.schemes) labels.push_back(s.label());
        detail::run_drops(c, var, labels, std::vector<double>(c.schemes.size(), v), threads, table);
      }
      break;
    case SweepVariable::kReuse: {
      SimConfig c = cfg;
      c.schemes.clear();
      for (double v : spec.values) c.schemes.push_back(PilotScheme::reuse(static_cast<std::size_t>(v)));
      try {
        c.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("--values: ") + e.what());
      }
      detail::run_drops(c, var, std::vector<std::string>(c.schemes.size(), "reuse"), spec.values,
                        threads, table);
      break;
    }
    case SweepVariable::kTau: {
      SimConfig c = cfg;
      c.schemes.clear();
      std::vector<std::string> labels;
      std::vector<double> values;
      for (double v : spec.values)
        for (const PilotScheme& s : cfg.schemes) {
          c.schemes.push_back(s.kind == PilotScheme::Kind::kGrouping ? PilotScheme::grouping(v) : s);
          labels.push_back(s.label());
          values.push_back(v);
        }
      // Reuse schemes do not depend on tau: simulate them once and copy rows.
      SimConfig unique = c;
      unique.schemes.clear();
      std::vector<std::size_t> index_of;
      for (const PilotScheme& s : c.schemes) {
        auto it = std::find(unique.schemes.begin(), unique.schemes.end(), s);
        index_of.push_back(static_cast<std::size_t>(it - unique.schemes.begin()));
        if (it == unique.schemes.end()) unique.schemes.push_back(s);
      }
      ResultTable scratch;
      detail::run_drops(unique, var, std::vector<std::string>(unique.schemes.size()),
                        std::vector<double>(unique.schemes.size(), 0.0), threads, scratch);
      const std::size_t np = unique.precoders.size();
      for (std::size_t s = 0; s < c.schemes.size(); ++s)
        for (std::size_t p = 0; p < np; ++p) {
          ResultRow row = scratch.rows[index_of[s] * np + p];
          row.value = values[s];
          row.scheme = labels[s];
          table.rows.push_back(std::move(row));
        }
      break;
    }
  }
  table.sort();
  return table;
}

}  // namespace pilotsim
