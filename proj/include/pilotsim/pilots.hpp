// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// User grouping by large-scale channel quality and pilot assignment.
//
// Three pilot schemes are supported:
//   reuse-1    every cell uses the same K pilots;
//   reuse-xi   cells are colored with xi colors and each color owns a bank
//              of K pilots (Y_p = xi * K);
//   grouping   center users share one bank, ranked by quality, while every
//              edge user gets a pilot no other user in the network uses.

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotsim/scenario.hpp"

namespace pilotsim {

/// Per-user channel quality, indexed (cell i, user k).
struct QualityVector {
  std::size_t users_per_cell = 0;
  std::vector<double> ell;

  std::size_t num_cells() const {
    return users_per_cell == 0 ? 0 : ell.size() / users_per_cell;
  }
  double at(std::size_t i, std::size_t k) const { return ell[i * users_per_cell + k]; }
  std::span<const double> cell(std::size_t i) const {
    return std::span<const double>(ell).subspan(i * users_per_cell, users_per_cell);
  }
};

struct Grouping {
  double tau = 1.0;
  std::size_t users_per_cell = 0;
  std::vector<double> mu;  // per-cell midrange threshold
  /// Center users per cell, ordered by decreasing quality (ties by index).
  std::vector<std::vector<std::size_t>> center;
  /// Edge users per cell, ordered by user index.
  std::vector<std::vector<std::size_t>> edge;

  std::size_t num_cells() const { return center.size(); }
  std::size_t center_count(std::size_t i) const { return center[i].size(); }
  std::size_t edge_count(std::size_t i) const { return edge[i].size(); }
  bool is_edge(std::size_t i, std::size_t k) const {
    return std::find(edge[i].begin(), edge[i].end(), k) != edge[i].end();
  }
};

struct PilotScheme {
  enum class Kind { kReuse, kGrouping };

  Kind kind = Kind::kReuse;
  std::size_t reuse_factor = 1;  // kReuse only
  double tau = 1.0;              // kGrouping only

  static PilotScheme reuse(std::size_t factor) { return {Kind::kReuse, factor, 1.0}; }
  static PilotScheme grouping(double tau) { return {Kind::kGrouping, 1, tau}; }

  /// "reuse<xi>" or "grouping".
  std::string label() const {
    return kind == Kind::kReuse ? "reuse" + std::to_string(reuse_factor) : "grouping";
  }

  /// Parses "reuse<xi>" (xi >= 1) or "grouping".
  static PilotScheme parse(const std::string& text, double tau = 1.0) {
    if (text == "grouping") return grouping(tau);
    if (text.rfind("reuse", 0) == 0 && text.size() > 5 &&
        std::all_of(text.begin() + 5, text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      const std::size_t factor = std::stoul(text.substr(5));
      if (factor >= 1) return reuse(factor);
    }
    throw std::invalid_argument("unknown pilot scheme '" + text +
                                "' (expected reuse1, reuse3, reuse7 or grouping)");
  }

  friend bool operator==(const PilotScheme&, const PilotScheme&) = default;
};

struct PilotPlan {
  std::size_t num_cells = 0;
  std::size_t users_per_cell = 0;
  std::size_t pilot_length = 0;  // Y_p
  PilotScheme scheme;
  std::vector<std::size_t> pilot_index;            // per (cell, user), 0-based
  std::vector<std::vector<std::size_t>> copilot;   // per (cell, user): cells in C_jk, ascending
  std::vector<bool> edge;                          // per (cell, user); grouping only
  /// user_with_pilot[l * Y_p + p]: user of cell l holding pilot p, or npos.
  std::vector<std::size_t> user_with_pilot;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t pilot(std::size_t j, std::size_t k) const {
    return pilot_index[j * users_per_cell + k];
  }
  const std::vector<std::size_t>& copilot_cells(std::size_t j, std::size_t k) const {
    return copilot[j * users_per_cell + k];
  }
  bool is_edge(std::size_t j, std::size_t k) const { return edge[j * users_per_cell + k]; }
  std::size_t holder(std::size_t l, std::size_t p) const {
    return user_with_pilot[l * pilot_length + p];
  }
  /// User of cell l sharing the pilot of user (j, k), or npos.
  std::size_t copilot_user(std::size_t l, std::size_t j, std::size_t k) const {
    return holder(l, pilot(j, k));
  }
  bool shares_pilot(std::size_t l, std::size_t i, std::size_t j, std::size_t k) const {
    return pilot(l, i) == pilot(j, k);
  }
};

struct OverheadReport {
  std::size_t training_symbols = 0;
  std::size_t coherence_symbols = 0;
  double prelog = 1.0;
};

/// Serving-cell large-scale gain, l_ik = Psi_iik.
inline QualityVector channel_quality(const LsfTensor& psi) {
  QualityVector q;
  q.users_per_cell = psi.users_per_cell();
  q.ell.reserve(psi.num_cells() * psi.users_per_cell());
  for (std::size_t i = 0; i < psi.num_cells(); ++i)
    for (std::size_t k = 0; k < psi.users_per_cell(); ++k) q.ell.push_back(psi(i, i, k));
  return q;
}

inline double midrange_threshold(std::span<const double> ell) {
  if (ell.empty()) throw std::invalid_argument("midrange_threshold: empty quality list");
  const auto [lo, hi] = std::minmax_element(ell.begin(), ell.end());
  return 0.5 * (*lo + *hi);
}

/// User (i, k) is a center user iff l_ik >= tau * mu_i.
inline Grouping group_users(const QualityVector& quality, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("grouping parameter tau must be >= 0");
  Grouping g;
  g.tau = tau;
  g.users_per_cell = quality.users_per_cell;
  const std::size_t cells = quality.num_cells();
  g.mu.resize(cells);
  g.center.resize(cells);
  g.edge.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const auto ell = quality.cell(i);
    g.mu[i] = midrange_threshold(ell);
    const double threshold = tau * g.mu[i];
    for (std::size_t k = 0; k < ell.size(); ++k)
      (ell[k] >= threshold ? g.center[i] : g.edge[i]).push_back(k);
    std::stable_sort(g.center[i].begin(), g.center[i].end(),
                     [&](std::size_t a, std::size_t b) { return ell[a] > ell[b]; });
  }
  return g;
}

/// Colors the cells of `layout` with `factor` colors. Cells are visited in
/// index order and take the color that creates the fewest same-color
/// adjacencies, then the least-used color, then the lowest index. For the
/// built-in layouts this yields a proper coloring whenever one exists with
/// that many colors.
inline std::vector<std::size_t> reuse_coloring(const CellLayout& layout, std::size_t factor) {
  const std::size_t cells = layout.num_cells();
  if (factor < 1) throw std::invalid_argument("reuse factor must be >= 1");
  if (factor > cells)
    throw std::invalid_argument("reuse factor " + std::to_string(factor) +
                                " exceeds the number of cells " + std::to_string(cells));
  std::vector<std::size_t> color(cells, 0);
  std::vector<std::size_t> usage(factor, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t best = 0;
    std::size_t best_conflicts = std::numeric_limits<std::size_t>::max();
    for (std::size_t col = 0; col < factor; ++col) {
      std::size_t conflicts = 0;
      for (std::size_t prev = 0; prev < c; ++prev)
        conflicts += (color[prev] == col && layout.adjacent(prev, c)) ? 1 : 0;
      if (conflicts < best_conflicts ||
          (conflicts == best_conflicts && usage[col] < usage[best])) {
        best = col;
        best_conflicts = conflicts;
      }
    }
    color[c] = best;
    ++usage[best];
  }
  return color;
}

namespace detail {

inline void finalize_plan(PilotPlan& plan) {
  const std::size_t cells = plan.num_cells;
  const std::size_t users = plan.users_per_cell;
  plan.user_with_pilot.assign(cells * plan.pilot_length, PilotPlan::npos);
  for (std::size_t j = 0; j < cells; ++j)
    for (std::size_t k = 0; k < users; ++k) {
      const std::size_t p = plan.pilot(j, k);
      if (p >= plan.pilot_length) throw std::logic_error("pilot index out of range");
      std::size_t& slot = plan.user_with_pilot[j * plan.pilot_length + p];
      if (slot != PilotPlan::npos) throw std::logic_error("pilot collision inside a cell");
      slot = k;
    }
  plan.copilot.assign(cells * users, {});
  for (std::size_t j = 0; j < cells; ++j)
    for (std::size_t k = 0; k < users; ++k)
      for (std::size_t l = 0; l < cells; ++l)
        if (plan.copilot_user(l, j, k) != PilotPlan::npos)
          plan.copilot[j * users + k].push_back(l);
}

}  // namespace detail

inline PilotPlan assign_pilots(const Grouping& grouping, const PilotScheme& scheme,
                               const CellLayout& layout) {
  const std::size_t cells = grouping.num_cells();
  const std::size_t users = grouping.users_per_cell;
  if (cells != layout.num_cells())
    throw std::invalid_argument("grouping and layout disagree on the number of cells");
  for (std::size_t i = 0; i < cells; ++i)
    if (grouping.center_count(i) + grouping.edge_count(i) != users)
      throw std::invalid_argument("inconsistent users per cell in grouping");

  PilotPlan plan;
  plan.num_cells = cells;
  plan.users_per_cell = users;
  plan.scheme = scheme;
  plan.pilot_index.assign(cells * users, 0);
  plan.edge.assign(cells * users, false);

  if (scheme.kind == PilotScheme::Kind::kReuse) {
    const std::size_t factor = scheme.reuse_factor;
    const auto color = reuse_coloring(layout, factor);
    if (factor == 3 || factor == 7) {
      for (std::size_t a = 0; a < cells; ++a)
        for (std::size_t b = a + 1; b < cells; ++b)
          if (color[a] == color[b] && layout.adjacent(a, b))
            throw std::invalid_argument("layout admits no proper " + std::to_string(factor) +
                                        "-coloring for pilot reuse");
    }
    plan.pilot_length = factor * users;
    for (std::size_t j = 0; j < cells; ++j)
      for (std::size_t k = 0; k < users; ++k) plan.pilot_index[j * users + k] = color[j] * users + k;
  } else {
    std::size_t bank = 0;
    for (std::size_t i = 0; i < cells; ++i) bank = std::max(bank, grouping.center_count(i));
    std::size_t next_edge = bank;
    for (std::size_t i = 0; i < cells; ++i) {
      for (std::size_t rank = 0; rank < grouping.center[i].size(); ++rank)
        plan.pilot_index[i * users + grouping.center[i][rank]] = rank;
      for (std::size_t k : grouping.edge[i]) {
        plan.pilot_index[i * users + k] = next_edge++;
        plan.edge[i * users + k] = true;
      }
    }
    plan.pilot_length = next_edge;
  }
  detail::finalize_plan(plan);
  return plan;
}

inline OverheadReport pilot_overhead(const PilotPlan& plan, std::size_t coherence_symbols) {
  if (plan.pilot_length >= coherence_symbols)
    throw std::invalid_argument("pilot length " + std::to_string(plan.pilot_length) +
                                " must be shorter than the coherence block " +
                                std::to_string(coherence_symbols));
  OverheadReport report;
  report.training_symbols = plan.pilot_length;
  report.coherence_symbols = coherence_symbols;
  report.prelog = 1.0 - static_cast<double>(plan.pilot_length) /
                            static_cast<double>(coherence_symbols);
  return report;
}

}  // namespace pilotsim
