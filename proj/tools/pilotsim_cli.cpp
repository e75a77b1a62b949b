// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

// pilotsim run   --config PATH [--seed N] [--out DIR] [--threads N]
// pilotsim sweep --config PATH --var {m|reuse|tau} --values a,b,c
//                [--emit-plots] [--out DIR] [--threads N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pilotsim/pilotsim.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  for (const std::string& item : pilotsim::detail::split_list(text))
    values.push_back(pilotsim::detail::parse_number<double>("--values", item));
  return values;
}

void report(const pilotsim::ResultTable& table, const std::vector<std::filesystem::path>& files) {
  for (const auto& row : table.rows)
    std::cout << row.sweep_var << '=' << pilotsim::format_number(row.value) << ' ' << row.scheme
              << ' ' << row.precoder << ": " << pilotsim::format_number(row.mean_rate)
              << " bit/s/Hz (+/- " << pilotsim::format_number(row.ci95) << "), "
              << pilotsim::format_number(row.mean_sinr_db) << " dB\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cell massive MIMO pilot contamination simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "simulate the configured operating point");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");

  std::string variable;
  std::string values_text;
  bool emit_plots = false;
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
  sweep->add_option("--config", config_path, "configuration file")->required();
  sweep->add_option("--var", variable, "m, reuse or tau")->required();
  sweep->add_option("--values", values_text, "comma-separated increasing values")->required();
  sweep->add_flag("--emit-plots", emit_plots, "write plot_<scheme>.svg");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    pilotsim::SimConfig cfg = pilotsim::load_config(config_path);
    if (seed) cfg.seed = *seed;
    pilotsim::SweepSpec spec;
    if (*run) {
      spec.variable = pilotsim::SweepVariable::kAntennas;
      spec.values = {static_cast<double>(cfg.antennas)};
    } else {
      spec.variable = pilotsim::parse_sweep_variable(variable);
      spec.values = parse_values(values_text);
    }
    const pilotsim::ResultTable table = pilotsim::run_sweep(cfg, spec, threads);
    report(table, pilotsim::write_results(table, out_dir, emit_plots));
  } catch (const pilotsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pilotsim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
