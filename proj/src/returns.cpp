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

#include "vmpo/returns.hpp"

#include <cmath>
#include <stdexcept>

namespace vmpo {

void TrajectoryUnroll::validate() const {
  const std::size_t m = actions.size();
  if (m == 0 || rewards.size() != m || observations.size() != m + 1 ||
      behavior_log_probs.size() != m) {
    throw std::invalid_argument("TrajectoryUnroll: inconsistent lengths");
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) throw std::invalid_argument("TrajectoryUnroll: non-finite reward");
  }
}

std::vector<double> n_step_returns(const TrajectoryUnroll& unroll,
                                   std::span<const double> values, double gamma) {
  unroll.validate();
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::invalid_argument("n_step_returns: gamma must lie in (0, 1)");
  }
  const std::size_t m = unroll.length();
  if (values.size() != m + 1) {
    throw std::invalid_argument("n_step_returns: need one value per state incl. bootstrap");
  }
  std::vector<double> returns(m);
  double g = unroll.terminal ? 0.0 : values[m];
  for (std::size_t l = m; l-- > 0;) {
    g = unroll.rewards[l] + gamma * g;
    returns[l] = g;
  }
  return returns;
}

AdvantageBatch advantages(std::span<const double> returns, std::span<const double> values) {
  if (returns.size() != values.size()) {
    throw std::invalid_argument("advantages: length mismatch");
  }
  AdvantageBatch batch;
  batch.return_target.assign(returns.begin(), returns.end());
  batch.value.assign(values.begin(), values.end());
  batch.advantage.resize(returns.size());
  for (std::size_t i = 0; i < returns.size(); ++i) {
    batch.advantage[i] = returns[i] - values[i];
  }
  return batch;
}

}  // namespace vmpo
