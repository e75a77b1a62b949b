// Copyright 2026 The pilotsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pilotsim/harness.hpp"

namespace pilotsim {

inline constexpr const char* kResultsHeader =
    "sweep_var,value,scheme,precoder,mean_rate_bps_hz,mean_sinr_db,ci95,drops,blocks";

/// Six significant digits, printf %g style.
inline std::string format_number(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return buf.data();
}

inline std::string results_csv(const ResultTable& table) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const ResultRow& r : table.rows)
    out << r.sweep_var << ',' << format_number(r.value) << ',' << r.scheme << ',' << r.precoder
        << ',' << format_number(r.mean_rate) << ',' << format_number(r.mean_sinr_db) << ','
        << format_number(r.ci95) << ',' << r.drops << ',' << r.blocks << '\n';
  return out.str();
}

/// "reuse1", "reuse3", "reuse" -> "reuse"; anything else is its own family.
inline std::string scheme_family(const std::string& scheme) {
  return scheme.rfind("reuse", 0) == 0 ? "reuse" : scheme;
}

namespace detail {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Static line chart of mean rate against the sweep value, one path per
/// (precoder, scheme) series.
inline std::string render_svg(const ResultTable& table, const std::string& family) {
  std::vector<detail::Series> series;
  std::string x_label;
  for (const ResultRow& r : table.rows) {
    if (scheme_family(r.scheme) != family) continue;
    x_label = r.sweep_var;
    const std::string name = r.precoder + " " + r.scheme;
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const detail::Series& s) { return s.name == name; });
    if (it == series.end()) {
      series.push_back({name, {}});
      it = std::prev(series.end());
    }
    it->points.emplace_back(r.value, r.mean_rate);
  }
  std::sort(series.begin(), series.end(),
            [](const detail::Series& a, const detail::Series& b) { return a.name < b.name; });

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_hi = 0.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_hi = std::max(y_hi, y);
    }
  if (series.empty()) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= 0.0) y_hi = 1.0;
  y_hi *= 1.1;

  constexpr double width = 720, height = 440;
  constexpr double left = 70, right = 170, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return top + plot_h - y / y_hi * plot_h; };

  static constexpr std::array<const char*, 8> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << detail::xml_escape(family)
      << "</text>\n";
  svg << "<line class=\"axis\" x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line class=\"axis\" x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y_hi * t / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_number(yv) << "</text>\n";
    const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_number(xv) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::xml_escape(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">mean rate [bit/s/Hz]</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = palette[i % palette.size()];
    svg << "<path class=\"series\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" d=\"";
    for (std::size_t p = 0; p < s.points.size(); ++p)
      svg << (p == 0 ? "M" : " L") << format_number(px(s.points[p].first)) << ' '
          << format_number(py(s.points[p].second));
    svg << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(i);
    svg << "<rect class=\"legend\" x=\"" << left + plot_w + 14 << "\" y=\"" << ly - 8
        << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text class=\"legend\" x=\"" << left + plot_w + 34 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

/// Writes results.csv and, with `emit_plots`, plot_<family>.svg per scheme
/// family. Returns the written paths.
inline std::vector<std::filesystem::path> write_results(const ResultTable& table,
                                                        const std::filesystem::path& out_dir,
                                                        bool emit_plots) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
    written.push_back(path);
  };
  write(out_dir / "results.csv", results_csv(table));
  if (emit_plots) {
    std::vector<std::string> families;
    for (const ResultRow& r : table.rows) {
      const std::string f = scheme_family(r.scheme);
      if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
    }
    std::sort(families.begin(), families.end());
    for (const std::string& f : families) write(out_dir / ("plot_" + f + ".svg"), render_svg(table, f));
  }
  return written;
}

}  // namespace pilotsim
