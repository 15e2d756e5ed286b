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

#ifndef VMPO_RETURNS_HPP_
#define VMPO_RETURNS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vmpo/env.hpp"

namespace vmpo {

// Length-m segment of one episode: m (state, action, reward) tuples plus the
// next state, which is the bootstrap state when the segment did not end the
// episode.
struct TrajectoryUnroll {
  std::vector<std::vector<double>> observations;  // m + 1 entries
  std::vector<Action> actions;                    // m entries
  std::vector<double> rewards;                    // m entries, rewards[t] = r(s_t, a_t)
  std::vector<double> behavior_log_probs;         // log-probs at acting time
  bool terminal = false;  // episode ended at the last observation
  int task_id = 0;
  std::uint64_t snapshot_version = 0;

  std::size_t length() const { return actions.size(); }
  void validate() const;
};

// n-step return targets for every state of the unroll, bootstrapping from
// the value of the final state only (zero when the unroll hit a terminal).
// Computed by the backward recurrence G_l = r_l + gamma * G_{l+1} with
// G_m = bootstrap.
std::vector<double> n_step_returns(const TrajectoryUnroll& unroll,
                                   std::span<const double> values, double gamma);

// Per-sample A = G - V; all three views are plain numbers, no gradients flow
// through them.
struct AdvantageBatch {
  std::vector<double> advantage;
  std::vector<double> return_target;
  std::vector<double> value;
};

AdvantageBatch advantages(std::span<const double> returns, std::span<const double> values);

}  // namespace vmpo

#endif  // VMPO_RETURNS_HPP_
