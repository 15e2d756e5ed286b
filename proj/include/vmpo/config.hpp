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

#ifndef VMPO_CONFIG_HPP_
#define VMPO_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "vmpo/env.hpp"
#include "vmpo/objective.hpp"

namespace vmpo {

// Training configuration. Constraint bounds left as NaN are resolved per
// action-space kind: discrete tasks use eps_eta 0.1 and eps_alpha 0.005,
// continuous tasks use eps_eta 0.01, eps_alpha_mu 0.05, eps_alpha_sigma 1e-5.
struct TrainConfig {
  std::string env_name = "chain";
  std::map<std::string, double> env_params;

  double gamma = 0.99;
  int unroll_length = 16;
  int num_unrolls = 64;
  int actors = 1;
  std::uint64_t learn_steps = 1000;
  std::uint64_t t_target = 10;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  std::uint64_t eval_interval = 50;
  int eval_episodes = 20;
  bool eval_mode_actions = true;
  std::string out_dir = "out";
  bool importance_weighting = false;
  double popart_step_size = 1e-4;

  double eps_eta = kUnset;
  double eps_alpha = kUnset;
  double eps_alpha_mu = kUnset;
  double eps_alpha_sigma = kUnset;
  double init_eta = 1.0;
  double init_alpha = 5.0;
  double init_alpha_mu = 1.0;
  double init_alpha_sigma = 1.0;

  static constexpr double kUnset = -1.0;
};

// Flat key=value lines, '#' comments; unknown keys are errors.
TrainConfig parse_config_text(const std::string& text);
TrainConfig parse_config_file(const std::string& path);
void apply_config_entry(TrainConfig& config, const std::string& key, const std::string& value);
void validate_config(const TrainConfig& config);

// Constraint bounds and initial multipliers for the configured env kind.
LagrangeState resolve_lagrange(const TrainConfig& config, ActionSpace::Kind kind);

// Documentation of every key with its default.
std::string config_reference();

}  // namespace vmpo

#endif  // VMPO_CONFIG_HPP_
