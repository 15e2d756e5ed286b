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

#include "vmpo/popart.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmpo {

namespace {

double derive_scale(const PopArtStats& s, double mean, double second) {
  const double var = std::max(second - mean * mean, s.scale_lo * s.scale_lo);
  return std::clamp(std::sqrt(var), s.scale_lo, s.scale_hi);
}

void check_task(const PopArtStats& s, int task) {
  if (task < 0 || task >= s.num_tasks()) {
    throw std::invalid_argument("popart: task " + std::to_string(task) +
                                " outside [0, " + std::to_string(s.num_tasks()) + ")");
  }
}

}  // namespace

PopArtStats PopArtStats::init(int num_tasks, double step_size) {
  if (num_tasks < 1) throw std::invalid_argument("popart: need at least one task");
  if (step_size <= 0.0 || step_size >= 1.0) {
    throw std::invalid_argument("popart: step size must lie in (0, 1)");
  }
  PopArtStats s;
  s.mean.assign(num_tasks, 0.0);
  s.second_moment.assign(num_tasks, 1.0);
  s.scale.assign(num_tasks, 1.0);
  s.step_size = step_size;
  return s;
}

PopArtStats popart_update(const PopArtStats& stats, std::span<const double> targets,
                          std::span<const int> task_ids) {
  if (targets.size() != task_ids.size()) {
    throw std::invalid_argument("popart_update: targets/task_ids length mismatch");
  }
  PopArtStats out = stats;
  const int tasks = stats.num_tasks();
  std::vector<double> sum(tasks, 0.0), sum_sq(tasks, 0.0);
  std::vector<std::size_t> count(tasks, 0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    check_task(stats, task_ids[i]);
    sum[task_ids[i]] += targets[i];
    sum_sq[task_ids[i]] += targets[i] * targets[i];
    count[task_ids[i]] += 1;
  }
  const double beta = stats.step_size;
  for (int t = 0; t < tasks; ++t) {
    if (count[t] == 0) continue;
    const double batch_mean = sum[t] / static_cast<double>(count[t]);
    const double batch_second = sum_sq[t] / static_cast<double>(count[t]);
    out.mean[t] = (1.0 - beta) * stats.mean[t] + beta * batch_mean;
    out.second_moment[t] = (1.0 - beta) * stats.second_moment[t] + beta * batch_second;
    out.scale[t] = derive_scale(out, out.mean[t], out.second_moment[t]);
  }
  return out;
}

double popart_normalize(const PopArtStats& stats, double target, int task) {
  check_task(stats, task);
  return (target - stats.mean[task]) / stats.scale[task];
}

double popart_denormalize(const PopArtStats& stats, double normalized, int task) {
  check_task(stats, task);
  return normalized * stats.scale[task] + stats.mean[task];
}

}  // namespace vmpo
