// Copyright 2026 The vmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmpo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "vmpo/metrics.hpp"

namespace vmpo {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 830.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 470.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::size_t column_of(const MetricsFile& metrics, const std::string& field) {
  for (std::size_t i = 0; i < metrics.fields.size(); ++i) {
    if (metrics.fields[i] == field) return i;
  }
  std::string available;
  for (const auto& f : metrics.fields) {
    if (!available.empty()) available += ", ";
    available += f;
  }
  throw std::invalid_argument("plot: unknown field '" + field + "'; available: " + available);
}

void write_chart(const std::string& path, const std::string& field,
                 const std::vector<double>& x, const std::vector<double>& y) {
  double x_lo = x[0], x_hi = x[0], y_lo = y[0], y_hi = y[0];
  for (double v : x) {
    x_lo = std::min(x_lo, v);
    x_hi = std::max(x_hi, v);
  }
  for (double v : y) {
    y_lo = std::min(y_lo, v);
    y_hi = std::max(y_hi, v);
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_lo -= 1.0;
    y_hi += 1.0;
  } else {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }
  auto map_x = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * (kRight - kLeft); };
  auto map_y = [&](double v) { return kBottom - (v - y_lo) / (y_hi - y_lo) * (kBottom - kTop); };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("plot: cannot open " + path + " for writing");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << (kWidth / 2) << "\" y=\"28\" font-family=\"sans-serif\" "
      << "font-size=\"18\" text-anchor=\"middle\">" << field << "</text>\n";

  // Axes.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
    out << "<line x1=\"" << num(map_x(fx)) << "\" y1=\"" << kBottom << "\" x2=\""
        << num(map_x(fx)) << "\" y2=\"" << (kBottom + 6) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(map_x(fx)) << "\" y=\"" << (kBottom + 22)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << num(fx)
        << "</text>\n"
        << "<line x1=\"" << (kLeft - 6) << "\" y1=\"" << num(map_y(fy)) << "\" x2=\"" << kLeft
        << "\" y2=\"" << num(map_y(fy)) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << (kLeft - 10) << "\" y=\"" << num(map_y(fy) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" << num(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << (kWidth / 2) << "\" y=\"" << (kHeight - 8)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">"
      << "env_frames</text>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out << ' ';
    out << num(map_x(x[i])) << ',' << num(map_y(y[i]));
  }
  out << "\"/>\n</svg>\n";
  if (!out) throw std::runtime_error("plot: write to " + path + " failed");
}

}  // namespace

std::vector<std::string> emit_plot(const std::string& metrics_path,
                                   const std::vector<std::string>& fields,
                                   const std::string& out_dir) {
  if (fields.empty()) throw std::invalid_argument("plot: no fields requested");
  const MetricsFile metrics = read_metrics(metrics_path);
  if (metrics.rows.empty()) {
    throw std::runtime_error("plot: " + metrics_path + " contains no data rows");
  }
  const std::size_t x_col = column_of(metrics, "env_frames");
  std::vector<double> x;
  x.reserve(metrics.rows.size());
  for (const auto& row : metrics.rows) x.push_back(row[x_col]);

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  for (const std::string& field : fields) {
    const std::size_t col = column_of(metrics, field);
    std::vector<double> y;
    y.reserve(metrics.rows.size());
    for (const auto& row : metrics.rows) y.push_back(row[col]);
    const std::string path = out_dir + "/" + field + ".svg";
    write_chart(path, field, x, y);
    written.push_back(path);
  }
  return written;
}

}  // namespace vmpo
