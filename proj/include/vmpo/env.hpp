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

#ifndef VMPO_ENV_HPP_
#define VMPO_ENV_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vmpo {

// Discrete action index or continuous action vector.
using Action = std::variant<int, std::vector<double>>;

struct ActionSpace {
  enum class Kind { kDiscrete, kContinuous };
  Kind kind = Kind::kDiscrete;
  int size = 0;  // action count (discrete) or dimension (continuous)
  double low = -1.0, high = 1.0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;
};

// Episodic environment. Deterministic given the reset seed and the action
// sequence; stochastic environments consume only their own seeded generator.
// Continuous actions are clipped to the action bounds inside step().
class EnvModel {
 public:
  virtual ~EnvModel() = default;

  virtual std::string name() const = 0;
  virtual int observation_dim() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual int task_id() const = 0;

  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(const Action& action) = 0;

  // Full mid-episode state for checkpoint resume.
  virtual std::vector<double> save_state() const = 0;
  virtual void load_state(std::span<const double> state) = 0;
};

// Registry keyed by environment name: "chain", "cartpole", "pointmass".
// Unknown names and unknown parameter keys are errors.
std::unique_ptr<EnvModel> make_env(const std::string& name,
                                   const std::map<std::string, double>& params = {},
                                   int task_id = 0);

// Factories for direct construction.
std::unique_ptr<EnvModel> make_chain_mdp(int length, double slip, double reward_scale = 1.0,
                                         int task_id = 0);
std::unique_ptr<EnvModel> make_cartpole(int task_id = 0);
std::unique_ptr<EnvModel> make_point_mass(int dim = 2, double dt = 0.05, int horizon = 100,
                                          int task_id = 0);

}  // namespace vmpo

#endif  // VMPO_ENV_HPP_
