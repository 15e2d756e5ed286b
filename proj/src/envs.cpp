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

#include "vmpo/env.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "vmpo/rng.hpp"

namespace vmpo {

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown_params(const std::string& env,
                           const std::map<std::string, double>& params,
                           std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end()) {
      throw std::invalid_argument("env " + env + ": unknown parameter " + key);
    }
  }
}

void append_engine(std::vector<double>& out, const RngEngine& rng) {
  const std::vector<std::uint64_t> words = save_engine(rng);
  out.push_back(static_cast<double>(words.size()));
  for (std::uint64_t w : words) out.push_back(std::bit_cast<double>(w));
}

std::size_t read_engine(RngEngine& rng, std::span<const double> state, std::size_t pos) {
  const auto count = static_cast<std::size_t>(state[pos++]);
  std::vector<std::uint64_t> words(count);
  for (std::size_t i = 0; i < count; ++i) words[i] = std::bit_cast<std::uint64_t>(state[pos++]);
  load_engine(rng, words);
  return pos;
}

int discrete_action(const Action& action, int count) {
  const int* a = std::get_if<int>(&action);
  if (a == nullptr) throw std::invalid_argument("env: expected a discrete action");
  if (*a < 0 || *a >= count) {
    throw std::invalid_argument("env: discrete action " + std::to_string(*a) +
                                " outside [0, " + std::to_string(count) + ")");
  }
  return *a;
}

// L-state corridor. The agent starts at the left end; stepping right off the
// last-but-one cell pays 1 and ends the episode, pushing left against the
// left end pays 0.01 and ends the episode. Actions slip to their opposite
// with probability `slip`. Episodes are capped at 4L steps.
class ChainMdp final : public EnvModel {
 public:
  ChainMdp(int length, double slip, double reward_scale, int task_id)
      : length_(length), slip_(slip), reward_scale_(reward_scale), task_id_(task_id) {
    if (length < 2) throw std::invalid_argument("chain: length must be at least 2");
    if (slip < 0.0 || slip >= 1.0) throw std::invalid_argument("chain: slip must lie in [0, 1)");
  }

  std::string name() const override { return "chain"; }
  int observation_dim() const override { return length_; }
  ActionSpace action_space() const override {
    return {ActionSpace::Kind::kDiscrete, 2, 0.0, 0.0};
  }
  int task_id() const override { return task_id_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_.seed(seed);
    position_ = 0;
    steps_ = 0;
    return observation();
  }

  StepResult step(const Action& action) override {
    int a = discrete_action(action, 2);
    if (slip_ > 0.0 && draw_uniform(rng_, 0.0, 1.0) < slip_) a = 1 - a;
    steps_ += 1;
    StepResult result;
    if (a == 1) {  // right
      if (position_ + 1 == length_ - 1) {
        position_ += 1;
        result.reward = 1.0 * reward_scale_;
        result.terminal = true;
      } else {
        position_ += 1;
      }
    } else {  // left
      if (position_ == 0) {
        result.reward = 0.01 * reward_scale_;
        result.terminal = true;
      } else {
        position_ -= 1;
      }
    }
    if (steps_ >= 4 * length_) result.terminal = true;
    result.observation = observation();
    return result;
  }

  std::vector<double> save_state() const override {
    std::vector<double> s = {static_cast<double>(position_), static_cast<double>(steps_)};
    append_engine(s, rng_);
    return s;
  }

  void load_state(std::span<const double> state) override {
    position_ = static_cast<int>(state[0]);
    steps_ = static_cast<int>(state[1]);
    read_engine(rng_, state, 2);
  }

 private:
  std::vector<double> observation() const {
    std::vector<double> obs(length_, 0.0);
    obs[position_] = 1.0;
    return obs;
  }

  int length_;
  double slip_;
  double reward_scale_;
  int task_id_;
  int position_ = 0;
  int steps_ = 0;
  RngEngine rng_;
};

// Pole balancing with the classic cart-pole physics: explicit Euler at
// 0.02 s, gravity 9.8, cart mass 1.0, pole mass 0.1, half-length 0.5,
// force magnitude 10. Reward 1 per step; terminates when |angle| > 12 deg,
// |position| > 2.4, or after 500 steps.
class CartPole final : public EnvModel {
 public:
  explicit CartPole(int task_id) : task_id_(task_id) {}

  std::string name() const override { return "cartpole"; }
  int observation_dim() const override { return 4; }
  ActionSpace action_space() const override {
    return {ActionSpace::Kind::kDiscrete, 2, 0.0, 0.0};
  }
  int task_id() const override { return task_id_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_.seed(seed);
    for (double& s : state_) s = draw_uniform(rng_, -0.05, 0.05);
    steps_ = 0;
    return {state_[0], state_[1], state_[2], state_[3]};
  }

  StepResult step(const Action& action) override {
    const int a = discrete_action(action, 2);
    const double force = a == 1 ? kForce : -kForce;
    const double x = state_[0], x_dot = state_[1], theta = state_[2], theta_dot = state_[3];
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
    state_[0] = x + kTau * x_dot;
    state_[1] = x_dot + kTau * x_acc;
    state_[2] = theta + kTau * theta_dot;
    state_[3] = theta_dot + kTau * theta_acc;
    steps_ += 1;

    StepResult result;
    result.reward = 1.0;
    result.terminal = std::abs(state_[0]) > kPositionLimit ||
                      std::abs(state_[2]) > kAngleLimit || steps_ >= kMaxSteps;
    result.observation = {state_[0], state_[1], state_[2], state_[3]};
    return result;
  }

  std::vector<double> save_state() const override {
    std::vector<double> s = {state_[0], state_[1], state_[2], state_[3],
                             static_cast<double>(steps_)};
    append_engine(s, rng_);
    return s;
  }

  void load_state(std::span<const double> state) override {
    for (int i = 0; i < 4; ++i) state_[i] = state[i];
    steps_ = static_cast<int>(state[4]);
    read_engine(rng_, state, 5);
  }

  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kTotalMass = kCartMass + kPoleMass;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kPoleMassLength = kPoleMass * kHalfLength;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kAngleLimit = 12.0 * 3.14159265358979323846 / 180.0;
  static constexpr double kPositionLimit = 2.4;
  static constexpr int kMaxSteps = 500;

 private:
  int task_id_;
  double state_[4] = {0, 0, 0, 0};
  int steps_ = 0;
  RngEngine rng_;
};

// Double-integrator regulation task: position/velocity state per dimension,
// acceleration commands in [-1, 1], quadratic cost on position and action.
// Fixed horizon, no other termination.
class PointMass final : public EnvModel {
 public:
  PointMass(int dim, double dt, int horizon, int task_id)
      : dim_(dim), dt_(dt), horizon_(horizon), task_id_(task_id) {
    if (dim < 1) throw std::invalid_argument("pointmass: dim must be positive");
    if (dt <= 0.0) throw std::invalid_argument("pointmass: dt must be positive");
    if (horizon < 1) throw std::invalid_argument("pointmass: horizon must be positive");
    position_.assign(dim_, 0.0);
    velocity_.assign(dim_, 0.0);
  }

  std::string name() const override { return "pointmass"; }
  int observation_dim() const override { return 2 * dim_; }
  ActionSpace action_space() const override {
    return {ActionSpace::Kind::kContinuous, dim_, -1.0, 1.0};
  }
  int task_id() const override { return task_id_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_.seed(seed);
    for (int i = 0; i < dim_; ++i) {
      position_[i] = draw_uniform(rng_, -1.0, 1.0);
      velocity_[i] = 0.0;
    }
    steps_ = 0;
    return observation();
  }

  StepResult step(const Action& action) override {
    const auto* a = std::get_if<std::vector<double>>(&action);
    if (a == nullptr || static_cast<int>(a->size()) != dim_) {
      throw std::invalid_argument("pointmass: expected a continuous action of dimension " +
                                  std::to_string(dim_));
    }
    double cost = 0.0;
    for (int i = 0; i < dim_; ++i) cost += position_[i] * position_[i];
    std::vector<double> clipped(dim_);
    for (int i = 0; i < dim_; ++i) {
      clipped[i] = std::clamp((*a)[i], -1.0, 1.0);
      cost += 0.1 * clipped[i] * clipped[i];
    }
    for (int i = 0; i < dim_; ++i) {
      position_[i] += dt_ * velocity_[i];
      velocity_[i] += dt_ * clipped[i];
    }
    steps_ += 1;

    StepResult result;
    result.reward = -cost;
    result.terminal = steps_ >= horizon_;
    result.observation = observation();
    return result;
  }

  std::vector<double> save_state() const override {
    std::vector<double> s;
    s.reserve(2 * dim_ + 2);
    s.insert(s.end(), position_.begin(), position_.end());
    s.insert(s.end(), velocity_.begin(), velocity_.end());
    s.push_back(static_cast<double>(steps_));
    append_engine(s, rng_);
    return s;
  }

  void load_state(std::span<const double> state) override {
    for (int i = 0; i < dim_; ++i) position_[i] = state[i];
    for (int i = 0; i < dim_; ++i) velocity_[i] = state[dim_ + i];
    steps_ = static_cast<int>(state[2 * dim_]);
    read_engine(rng_, state, 2 * dim_ + 1);
  }

 private:
  std::vector<double> observation() const {
    std::vector<double> obs;
    obs.reserve(2 * dim_);
    obs.insert(obs.end(), position_.begin(), position_.end());
    obs.insert(obs.end(), velocity_.begin(), velocity_.end());
    return obs;
  }

  int dim_;
  double dt_;
  int horizon_;
  int task_id_;
  std::vector<double> position_;
  std::vector<double> velocity_;
  int steps_ = 0;
  RngEngine rng_;
};

}  // namespace

std::unique_ptr<EnvModel> make_chain_mdp(int length, double slip, double reward_scale,
                                         int task_id) {
  return std::make_unique<ChainMdp>(length, slip, reward_scale, task_id);
}

std::unique_ptr<EnvModel> make_cartpole(int task_id) {
  return std::make_unique<CartPole>(task_id);
}

std::unique_ptr<EnvModel> make_point_mass(int dim, double dt, int horizon, int task_id) {
  return std::make_unique<PointMass>(dim, dt, horizon, task_id);
}

std::unique_ptr<EnvModel> make_env(const std::string& name,
                                   const std::map<std::string, double>& params, int task_id) {
  if (name == "chain") {
    reject_unknown_params(name, params, {"length", "slip", "reward_scale"});
    return make_chain_mdp(static_cast<int>(param_or(params, "length", 5.0)),
                          param_or(params, "slip", 0.0),
                          param_or(params, "reward_scale", 1.0), task_id);
  }
  if (name == "cartpole") {
    reject_unknown_params(name, params, {});
    return make_cartpole(task_id);
  }
  if (name == "pointmass") {
    reject_unknown_params(name, params, {"dim", "dt", "horizon"});
    return make_point_mass(static_cast<int>(param_or(params, "dim", 2.0)),
                           param_or(params, "dt", 0.05),
                           static_cast<int>(param_or(params, "horizon", 100.0)), task_id);
  }
  throw std::invalid_argument("make_env: unknown environment " + name +
                              " (known: chain, cartpole, pointmass)");
}

}  // namespace vmpo
