// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// Simulation configuration: flat `key = value` text files.
//
//   # comment
//   cells = 7
//   scheme = reuse1, reuse3
//
// Unknown keys are rejected; missing keys keep their defaults.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pilotsim/errors.hpp"
#include "pilotsim/metrics.hpp"
#include "pilotsim/pilots.hpp"
#include "pilotsim/precoding.hpp"
#include "pilotsim/scenario.hpp"

namespace pilotsim {

enum class MeasuredCells { kCenter, kAll };

struct SimConfig {
  std::size_t cells = 7;
  std::size_t users_per_cell = 10;
  std::size_t antennas = 128;
  PathlossParams pathloss;
  double pilot_snr_db = 0.0;
  double dl_power_db = 0.0;
  double noise_power = 1.0;
  std::size_t coherence_symbols = 200;
  double tau = 1.0;
  std::vector<PilotScheme> schemes{PilotScheme::reuse(1)};
  std::vector<PrecoderKind> precoders{PrecoderKind::kMrt, PrecoderKind::kZf};
  std::size_t drops = 100;
  std::size_t blocks = 200;
  std::uint64_t seed = 1;
  MeasuredCells measure = MeasuredCells::kCenter;

  double pilot_snr() const { return from_db_(pilot_snr_db); }
  double dl_power() const { return from_db_(dl_power_db); }

  bool uses(PrecoderKind kind) const {
    return std::find(precoders.begin(), precoders.end(), kind) != precoders.end();
  }

  /// Largest pilot length a scheme can produce on this configuration.
  std::size_t worst_case_pilot_length(const PilotScheme& scheme) const {
    return scheme.kind == PilotScheme::Kind::kReuse ? scheme.reuse_factor * users_per_cell
                                                    : cells * users_per_cell;
  }

  /// Throws ConfigError naming the offending key.
  void validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
      throw ConfigError(key + ": " + why);
    };
    if (cells != 1 && cells != 3 && cells != 7) fail("cells", "supported values are 1, 3, 7");
    if (users_per_cell < 1) fail("users_per_cell", "must be >= 1");
    if (antennas < 1) fail("antennas", "must be >= 1");
    if (!(pathloss.min_distance > 0.0)) fail("min_distance_m", "must be positive");
    if (!(pathloss.cell_radius > pathloss.min_distance))
      fail("cell_radius_m", "must exceed min_distance_m");
    if (!(pathloss.pathloss_exponent > 2.0)) fail("pathloss_exponent", "must exceed 2");
    if (!(pathloss.shadowing_sigma_db >= 0.0)) fail("shadowing_sigma_db", "must be >= 0");
    if (!std::isfinite(pathloss.edge_snr_db)) fail("edge_snr_db", "must be finite");
    if (!std::isfinite(pilot_snr_db)) fail("pilot_snr_db", "must be finite");
    if (!std::isfinite(dl_power_db)) fail("dl_power_db", "must be finite");
    if (!(tau >= 0.0)) fail("tau", "must be >= 0");
    if (schemes.empty()) fail("scheme", "at least one scheme is required");
    for (const PilotScheme& s : schemes) {
      if (s.kind == PilotScheme::Kind::kReuse && s.reuse_factor > cells)
        fail("scheme", s.label() + " needs at least " + std::to_string(s.reuse_factor) + " cells");
      if (worst_case_pilot_length(s) >= coherence_symbols)
        fail("coherence_symbols", "must exceed the pilot length of " + s.label() + " (" +
                                      std::to_string(worst_case_pilot_length(s)) + ")");
    }
    if (precoders.empty()) fail("precoders", "at least one precoder is required");
    if (uses(PrecoderKind::kZf) && antennas <= users_per_cell)
      fail("antennas", "ZF requires antennas > users_per_cell");
    if (drops < 1) fail("drops", "must be >= 1");
    if (blocks < kMinSinrBlocks)
      fail("blocks", "must be >= " + std::to_string(kMinSinrBlocks));
  }

 private:
  static double from_db_(double db) { return std::pow(10.0, db / 10.0); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key + ": cannot parse '" + value + "' as a number");
  return out;
}

}  // namespace detail

/// Parses configuration text. `origin` prefixes line-level diagnostics.
inline SimConfig parse_config(std::string_view text, const std::string& origin = "config") {
  SimConfig cfg;
  std::map<std::string, std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(stripped).substr(0, eq));
    const std::string value = detail::trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": missing key");
    if (!entries.emplace(key, value).second) throw ConfigError(key + ": duplicate key");
  }

  using detail::parse_number;
  std::vector<std::string> scheme_names;
  for (const auto& [key, value] : entries) {
    if (key == "cells") cfg.cells = parse_number<std::size_t>(key, value);
    else if (key == "users_per_cell") cfg.users_per_cell = parse_number<std::size_t>(key, value);
    else if (key == "antennas") cfg.antennas = parse_number<std::size_t>(key, value);
    else if (key == "cell_radius_m") cfg.pathloss.cell_radius = parse_number<double>(key, value);
    else if (key == "min_distance_m") cfg.pathloss.min_distance = parse_number<double>(key, value);
    else if (key == "pathloss_exponent") cfg.pathloss.pathloss_exponent = parse_number<double>(key, value);
    else if (key == "shadowing_sigma_db") cfg.pathloss.shadowing_sigma_db = parse_number<double>(key, value);
    else if (key == "edge_snr_db") cfg.pathloss.edge_snr_db = parse_number<double>(key, value);
    else if (key == "pilot_snr_db") cfg.pilot_snr_db = parse_number<double>(key, value);
    else if (key == "dl_power_db") cfg.dl_power_db = parse_number<double>(key, value);
    else if (key == "coherence_symbols") cfg.coherence_symbols = parse_number<std::size_t>(key, value);
    else if (key == "tau") cfg.tau = parse_number<double>(key, value);
    else if (key == "scheme") scheme_names = detail::split_list(value);
    else if (key == "precoders") {
      cfg.precoders.clear();
      for (const std::string& name : detail::split_list(value)) {
        try {
          const PrecoderKind kind = parse_precoder(name);
          if (!cfg.uses(kind)) cfg.precoders.push_back(kind);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(key + ": " + e.what());
        }
      }
    } else if (key == "drops") cfg.drops = parse_number<std::size_t>(key, value);
    else if (key == "blocks") cfg.blocks = parse_number<std::size_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "measure") {
      if (value == "center") cfg.measure = MeasuredCells::kCenter;
      else if (value == "all") cfg.measure = MeasuredCells::kAll;
      else throw ConfigError(key + ": expected 'center' or 'all'");
    } else {
      throw ConfigError(key + ": unknown key");
    }
  }
  if (entries.count("scheme")) {
    cfg.schemes.clear();
    for (const std::string& name : scheme_names) {
      try {
        const PilotScheme s = PilotScheme::parse(name, cfg.tau);
        if (std::find(cfg.schemes.begin(), cfg.schemes.end(), s) == cfg.schemes.end())
          cfg.schemes.push_back(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scheme: ") + e.what());
      }
    }
  }
  for (PilotScheme& s : cfg.schemes)
    if (s.kind == PilotScheme::Kind::kGrouping) s.tau = cfg.tau;
  cfg.validate();
  return cfg;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace pilotsim
