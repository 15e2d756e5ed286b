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

#ifndef VMPO_TRAINER_HPP_
#define VMPO_TRAINER_HPP_

#include <string>
#include <vector>

#include "vmpo/checkpoint.hpp"
#include "vmpo/config.hpp"
#include "vmpo/metrics.hpp"
#include "vmpo/objective.hpp"
#include "vmpo/rollout.hpp"

namespace vmpo {

struct StepDiagnostics {
  ObjectiveDiagnostics objective;
  LagrangeState multipliers;  // after projection
  MetricsRow row;
  bool refreshed_snapshot = false;
  std::size_t batch_samples = 0;
};

// Single-process training loop: refresh the target snapshot on the gate,
// generate an on-policy batch, fit values and improve the policy with one
// optimizer step, project the multipliers, and record one metrics row per
// learn step. Deterministic for a fixed config and seed.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);
  // Multi-task form: one environment stream per roster entry; task ids
  // select the value channels. The default roster is the configured env.
  Trainer(TrainConfig config, std::vector<EnvFactory> roster);

  StepDiagnostics step();
  // Runs to config.learn_steps, writing metrics.csv and checkpoint.bin
  // under config.out_dir.
  void run();

  EvalStats evaluate(int episodes, std::uint64_t seed, bool mode_actions) const;

  Checkpoint make_checkpoint() const;
  void restore(const Checkpoint& checkpoint);

  const TrainConfig& config() const { return config_; }
  AgentNet& net() { return net_; }
  const AgentNet& net() const { return net_; }
  const PopArtStats& popart() const { return popart_; }
  const AdamState& adam() const { return adam_; }
  LagrangeState multipliers() const {
    return read_multipliers(net_.params(), lagrange_);
  }
  std::uint64_t learn_step() const { return learn_step_; }
  std::uint64_t env_frames() const { return env_frames_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }

 private:
  MetricsRow make_row(const ObjectiveDiagnostics& diag) const;

  TrainConfig config_;
  std::vector<EnvFactory> roster_;
  LagrangeState lagrange_;  // bounds; multiplier values live in the store
  AgentNet net_;
  PopArtStats popart_;
  AdamState adam_;
  std::vector<ActorState> actors_;
  ParameterSnapshot snapshot_;
  bool has_snapshot_ = false;
  std::uint64_t learn_step_ = 0;
  std::uint64_t env_frames_ = 0;
  EvalStats last_eval_;
  bool has_eval_ = false;
  std::vector<MetricsRow> rows_;
  MetricsWriter writer_;
};

// Evaluation against the environment stored in the checkpoint metadata.
EvalStats evaluate_checkpoint(const std::string& path, int episodes, std::uint64_t seed,
                              bool mode_actions);

}  // namespace vmpo

#endif  // VMPO_TRAINER_HPP_
