// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "pilotsim/harness.hpp"
#include "pilotsim/results.hpp"

namespace pilotsim {
namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.cells = 3;
  cfg.users_per_cell = 4;
  cfg.antennas = 16;
  cfg.drops = 4;
  cfg.blocks = 100;
  cfg.seed = 2024;
  cfg.schemes = {PilotScheme::reuse(1), PilotScheme::grouping(1.0)};
  return cfg;
}

TEST(RunTrial, RerunIsBitIdentical) {
  SimConfig cfg = small_config();
  cfg.blocks = 1000;
  const TrialResult a = run_trial(cfg, 0);
  const TrialResult b = run_trial(cfg, 0);
  ASSERT_EQ(a.schemes.size(), b.schemes.size());
  for (std::size_t s = 0; s < a.schemes.size(); ++s)
    for (std::size_t p = 0; p < a.schemes[s].precoders.size(); ++p) {
      const auto& ua = a.schemes[s].precoders[p].users;
      const auto& ub = b.schemes[s].precoders[p].users;
      ASSERT_EQ(ua.size(), ub.size());
      for (std::size_t i = 0; i < ua.size(); ++i) {
        EXPECT_EQ(ua[i].empirical.sinr, ub[i].empirical.sinr);
        EXPECT_EQ(ua[i].rate, ub[i].rate);
      }
    }
  EXPECT_EQ(a.psi.values(), b.psi.values());
}

TEST(RunTrial, DifferentDropsDiffer) {
  const SimConfig cfg = small_config();
  EXPECT_NE(run_trial(cfg, 0).psi.values(), run_trial(cfg, 1).psi.values());
}

TEST(RunTrial, SingleCellHasNoContamination) {
  SimConfig cfg = small_config();
  cfg.cells = 1;
  cfg.schemes = {PilotScheme::reuse(1)};
  const TrialResult t = run_trial(cfg, 0);
  for (const auto& p : t.schemes[0].precoders)
    for (const UserOutcome& u : p.users) {
      EXPECT_EQ(u.empirical.coherent_pc, 0.0);
      EXPECT_EQ(u.closed_form.coherent_pc, 0.0);
    }
}

TEST(RunTrial, GroupingEdgeUsersHaveOnlyTheirOwnCell) {
  SimConfig cfg = small_config();
  cfg.cells = 7;
  cfg.users_per_cell = 10;
  cfg.antennas = 32;
  cfg.measure = MeasuredCells::kAll;
  std::size_t edges = 0;
  for (std::size_t drop = 0; drop < 3; ++drop) {
    const TrialResult t = run_trial(cfg, drop);
    const SchemeOutcome& o = t.scheme(PilotScheme::grouping(1.0));
    for (std::size_t j = 0; j < 7; ++j)
      for (std::size_t k = 0; k < 10; ++k) {
        if (!o.plan.is_edge(j, k)) continue;
        ++edges;
        EXPECT_EQ(o.plan.copilot_cells(j, k), (std::vector<std::size_t>{j}));
        EXPECT_EQ(o.precoder(PrecoderKind::kMrt).user(j, k).empirical.coherent_pc, 0.0);
        EXPECT_TRUE(std::isinf(o.precoder(PrecoderKind::kMrt).user(j, k).asymptotic_sinr));
      }
  }
  EXPECT_GT(edges, 0u);
}

TEST(RunTrial, MeasuredPopulation) {
  SimConfig cfg = small_config();
  EXPECT_EQ(run_trial(cfg, 0).schemes[0].precoders[0].users.size(), 4u);
  cfg.measure = MeasuredCells::kAll;
  EXPECT_EQ(run_trial(cfg, 0).schemes[0].precoders[0].users.size(), 12u);
}

TEST(RunSweep, SingleValueEqualsTrialAggregation) {
  const SimConfig cfg = small_config();
  const ResultTable table = run_sweep(cfg, {SweepVariable::kAntennas, {16}}, 1);
  ASSERT_EQ(table.rows.size(), 4u);
  for (const PilotScheme& s : cfg.schemes)
    for (PrecoderKind kind : cfg.precoders) {
      std::vector<double> rates;
      double sinr = 0;
      for (std::size_t d = 0; d < cfg.drops; ++d) {
        const PrecoderOutcome& po = run_trial(cfg, d).scheme(s).precoder(kind);
        rates.push_back(po.mean_rate());
        sinr += po.mean_sinr();
      }
      double mean = 0;
      for (double r : rates) mean += r;
      mean /= static_cast<double>(rates.size());
      const ResultRow* row = table.find(16, s.label(), to_string(kind));
      ASSERT_NE(row, nullptr);
      EXPECT_DOUBLE_EQ(row->mean_rate, mean);
      EXPECT_DOUBLE_EQ(row->mean_sinr_db, 10.0 * std::log10(sinr / static_cast<double>(cfg.drops)));
      EXPECT_EQ(row->drop_rates, rates);
      EXPECT_EQ(row->drops, cfg.drops);
      EXPECT_EQ(row->blocks, cfg.blocks);
      EXPECT_GE(row->ci95, 0.0);
    }
}

TEST(RunSweep, ValuesAreIndependentOfEachOther) {
  const SimConfig cfg = small_config();
  const ResultTable both = run_sweep(cfg, {SweepVariable::kAntennas, {16, 24}}, 1);
  const ResultTable one = run_sweep(cfg, {SweepVariable::kAntennas, {24}}, 1);
  for (const ResultRow& r : one.rows) {
    const ResultRow* match = both.find(24, r.scheme, r.precoder);
    ASSERT_NE(match, nullptr);
    EXPECT_EQ(match->mean_rate, r.mean_rate);
    EXPECT_EQ(match->ci95, r.ci95);
  }
}

TEST(RunSweep, ThreadCountDoesNotChangeOutput) {
  const SimConfig cfg = small_config();
  const SweepSpec spec{SweepVariable::kAntennas, {16, 32}};
  EXPECT_EQ(results_csv(run_sweep(cfg, spec, 1)), results_csv(run_sweep(cfg, spec, 3)));
}

TEST(RunSweep, RowsSortedByValueSchemePrecoder) {
  const ResultTable t = run_sweep(small_config(), {SweepVariable::kAntennas, {16, 24}}, 1);
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    EXPECT_FALSE(t.rows[i].sort_key() < t.rows[i - 1].sort_key());
}

TEST(RunSweep, ConfidenceShrinksWithDrops) {
  SimConfig cfg = small_config();
  cfg.schemes = {PilotScheme::reuse(1)};
  cfg.precoders = {PrecoderKind::kMrt};
  cfg.drops = 100;
  const double ci100 = run_sweep(cfg, {SweepVariable::kAntennas, {16}}).rows[0].ci95;
  cfg.drops = 400;
  const double ci400 = run_sweep(cfg, {SweepVariable::kAntennas, {16}}).rows[0].ci95;
  EXPECT_NEAR(ci100 / ci400, 2.0, 0.4);
}

TEST(RunSweep, ReuseSweepLabelsRowsByFactor) {
  SimConfig cfg = small_config();
  cfg.precoders = {PrecoderKind::kMrt};
  const ResultTable t = run_sweep(cfg, {SweepVariable::kReuse, {1, 3}}, 1);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].sweep_var, "reuse");
  EXPECT_EQ(t.rows[0].scheme, "reuse");
  EXPECT_EQ(t.rows[0].value, 1.0);
  EXPECT_EQ(t.rows[1].value, 3.0);
  EXPECT_THROW(run_sweep(cfg, {SweepVariable::kReuse, {1, 7}}), ConfigError);
}

TEST(RunSweep, TauSweepMovesOnlyGrouping) {
  SimConfig cfg = small_config();
  cfg.precoders = {PrecoderKind::kMrt};
  const ResultTable t = run_sweep(cfg, {SweepVariable::kTau, {0.5, 1.0}}, 1);
  ASSERT_EQ(t.rows.size(), 4u);
  const ResultRow* r05 = t.find(0.5, "reuse1", "mrt");
  const ResultRow* r10 = t.find(1.0, "reuse1", "mrt");
  ASSERT_TRUE(r05 && r10);
  EXPECT_EQ(r05->mean_rate, r10->mean_rate);
  const ResultRow* g10 = t.find(1.0, "grouping", "mrt");
  ASSERT_NE(g10, nullptr);
  const ResultTable direct = run_sweep(cfg, {SweepVariable::kAntennas, {16}}, 1);
  EXPECT_EQ(g10->mean_rate, direct.find(16, "grouping", "mrt")->mean_rate);
}

TEST(SweepSpec, Validation) {
  EXPECT_THROW((SweepSpec{SweepVariable::kAntennas, {}}.validate()), ConfigError);
  EXPECT_THROW((SweepSpec{SweepVariable::kAntennas, {32, 16}}.validate()), ConfigError);
  EXPECT_THROW((SweepSpec{SweepVariable::kAntennas, {16.5}}.validate()), ConfigError);
  EXPECT_NO_THROW((SweepSpec{SweepVariable::kTau, {0.25, 1.5}}.validate()));
  EXPECT_EQ(parse_sweep_variable("reuse"), SweepVariable::kReuse);
  EXPECT_THROW(parse_sweep_variable("M"), ConfigError);
}

TEST(RunSweep, RejectsAntennaValuesBreakingZf) {
  EXPECT_THROW(run_sweep(small_config(), {SweepVariable::kAntennas, {4, 16}}), ConfigError);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace pilotsim
