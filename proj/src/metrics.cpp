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

#include "vmpo/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vmpo {

namespace {

// %.17g round-trips every finite double.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string metrics_header() {
  return "learn_step,env_frames,eval_mean_return,eval_min_return,eval_max_return,"
         "loss_value,loss_policy,loss_eta,loss_alpha,loss_alpha_mu,loss_alpha_sigma,"
         "eta,alpha,alpha_mu,alpha_sigma,mean_kl,mean_abs_advantage,popart_mean,"
         "popart_scale";
}

std::string format_metrics_row(const MetricsRow& r) {
  std::ostringstream out;
  out << r.learn_step << ',' << r.env_frames << ',' << fmt(r.eval_mean_return) << ','
      << fmt(r.eval_min_return) << ',' << fmt(r.eval_max_return) << ',' << fmt(r.loss_value)
      << ',' << fmt(r.loss_policy) << ',' << fmt(r.loss_eta) << ',' << fmt(r.loss_alpha) << ','
      << fmt(r.loss_alpha_mu) << ',' << fmt(r.loss_alpha_sigma) << ',' << fmt(r.eta) << ','
      << fmt(r.alpha) << ',' << fmt(r.alpha_mu) << ',' << fmt(r.alpha_sigma) << ','
      << fmt(r.mean_kl) << ',' << fmt(r.mean_abs_advantage) << ',' << fmt(r.popart_mean) << ','
      << fmt(r.popart_scale);
  return out.str();
}

void MetricsWriter::open(const std::string& path) {
  file_.open(path, std::ios::trunc);
  if (!file_) throw std::runtime_error("metrics: cannot open " + path + " for writing");
  file_ << kMetricsSchema << '\n' << metrics_header() << '\n';
  file_.flush();
}

void MetricsWriter::append(const MetricsRow& row) {
  if (!file_) throw std::runtime_error("metrics: writer is not open");
  file_ << format_metrics_row(row) << '\n';
  file_.flush();
  if (!file_) throw std::runtime_error("metrics: write failed");
}

MetricsFile read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("metrics: cannot open " + path);
  MetricsFile out;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(row, cell, ',')) out.fields.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != out.fields.size()) {
      throw std::runtime_error("metrics: malformed row in " + path);
    }
    out.rows.push_back(std::move(values));
  }
  if (!have_header) throw std::runtime_error("metrics: " + path + " has no header");
  return out;
}

}  // namespace vmpo
