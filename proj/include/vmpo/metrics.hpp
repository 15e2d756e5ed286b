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

#ifndef VMPO_METRICS_HPP_
#define VMPO_METRICS_HPP_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace vmpo {

// One row per learn step. Unused multiplier columns stay at zero so every
// cell is finite in both the discrete and continuous layouts.
struct MetricsRow {
  std::uint64_t learn_step = 0;
  std::uint64_t env_frames = 0;
  double eval_mean_return = 0.0;
  double eval_min_return = 0.0;
  double eval_max_return = 0.0;
  double loss_value = 0.0;
  double loss_policy = 0.0;
  double loss_eta = 0.0;
  double loss_alpha = 0.0;
  double loss_alpha_mu = 0.0;
  double loss_alpha_sigma = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double alpha_mu = 0.0;
  double alpha_sigma = 0.0;
  double mean_kl = 0.0;
  double mean_abs_advantage = 0.0;
  double popart_mean = 0.0;   // channel 0
  double popart_scale = 0.0;  // channel 0
};

// First line of every metrics file; bump when columns change.
inline constexpr const char* kMetricsSchema = "# schema=vmpo.metrics.v1";

std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);

class MetricsWriter {
 public:
  void open(const std::string& path);
  void append(const MetricsRow& row);
  bool is_open() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

struct MetricsFile {
  std::vector<std::string> fields;
  // rows[i][j] is column j of data row i, parsed as double.
  std::vector<std::vector<double>> rows;
};

MetricsFile read_metrics(const std::string& path);

}  // namespace vmpo

#endif  // VMPO_METRICS_HPP_
