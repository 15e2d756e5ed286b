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

#ifndef VMPO_POPART_HPP_
#define VMPO_POPART_HPP_

#include <span>
#include <vector>

namespace vmpo {

// Per-task shift/scale statistics for value-target normalization. The scale
// is derived from exponential moving averages of the first two moments and
// clamped to [scale_lo, scale_hi].
struct PopArtStats {
  std::vector<double> mean;           // first moment per task
  std::vector<double> second_moment;  // per task
  std::vector<double> scale;          // derived, clamped per task
  double step_size = 1e-4;
  double scale_lo = 1e-2;
  double scale_hi = 1e6;

  static PopArtStats init(int num_tasks, double step_size = 1e-4);
  int num_tasks() const { return static_cast<int>(mean.size()); }
};

// One moving-average step toward the batch statistics of each task that has
// samples in (targets, task_ids); other tasks are untouched.
PopArtStats popart_update(const PopArtStats& stats, std::span<const double> targets,
                          std::span<const int> task_ids);

double popart_normalize(const PopArtStats& stats, double target, int task);
double popart_denormalize(const PopArtStats& stats, double normalized, int task);

}  // namespace vmpo

#endif  // VMPO_POPART_HPP_
