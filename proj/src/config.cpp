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

#include "vmpo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vmpo {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key " + key + " has non-numeric value '" + value + "'");
  }
  if (consumed != value.size()) {
    throw std::invalid_argument("config: key " + key + " has non-numeric value '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw std::invalid_argument("config: key " + key + " expects 0/1/true/false, got '" + value +
                              "'");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  if (v < 0.0 || v != std::floor(v)) {
    throw std::invalid_argument("config: key " + key + " expects a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

void apply_config_entry(TrainConfig& config, const std::string& key, const std::string& value) {
  if (key == "env") {
    config.env_name = value;
  } else if (key.rfind("env.", 0) == 0) {
    config.env_params[key.substr(4)] = parse_number(key, value);
  } else if (key == "gamma") {
    config.gamma = parse_number(key, value);
  } else if (key == "unroll_length") {
    config.unroll_length = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "num_unrolls") {
    config.num_unrolls = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "actors") {
    config.actors = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "learn_steps") {
    config.learn_steps = parse_unsigned(key, value);
  } else if (key == "t_target") {
    config.t_target = parse_unsigned(key, value);
  } else if (key == "learning_rate") {
    config.learning_rate = parse_number(key, value);
  } else if (key == "seed") {
    config.seed = parse_unsigned(key, value);
  } else if (key == "eval_interval") {
    config.eval_interval = parse_unsigned(key, value);
  } else if (key == "eval_episodes") {
    config.eval_episodes = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "eval_mode_actions") {
    config.eval_mode_actions = parse_bool(key, value);
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else if (key == "importance_weighting") {
    config.importance_weighting = parse_bool(key, value);
  } else if (key == "popart_step_size") {
    config.popart_step_size = parse_number(key, value);
  } else if (key == "eps_eta") {
    config.eps_eta = parse_number(key, value);
  } else if (key == "eps_alpha") {
    config.eps_alpha = parse_number(key, value);
  } else if (key == "eps_alpha_mu") {
    config.eps_alpha_mu = parse_number(key, value);
  } else if (key == "eps_alpha_sigma") {
    config.eps_alpha_sigma = parse_number(key, value);
  } else if (key == "init_eta") {
    config.init_eta = parse_number(key, value);
  } else if (key == "init_alpha") {
    config.init_alpha = parse_number(key, value);
  } else if (key == "init_alpha_mu") {
    config.init_alpha_mu = parse_number(key, value);
  } else if (key == "init_alpha_sigma") {
    config.init_alpha_sigma = parse_number(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key +
                                "' (see the config-reference command)");
  }
}

TrainConfig parse_config_text(const std::string& text) {
  TrainConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not a key=value pair: '" + line + "'");
    }
    apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate_config(config);
  return config;
}

TrainConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void validate_config(const TrainConfig& config) {
  if (config.gamma <= 0.0 || config.gamma >= 1.0) {
    throw std::invalid_argument("config: gamma must lie in (0, 1)");
  }
  if (config.learning_rate <= 0.0) {
    throw std::invalid_argument("config: learning_rate must be positive");
  }
  if (config.unroll_length < 1) {
    throw std::invalid_argument("config: unroll_length must be at least 1");
  }
  if (config.num_unrolls < 1) {
    throw std::invalid_argument("config: num_unrolls must be at least 1");
  }
  if (config.actors < 1 || config.actors > config.num_unrolls) {
    throw std::invalid_argument("config: actors must lie in [1, num_unrolls]");
  }
  if (config.t_target < 1) throw std::invalid_argument("config: t_target must be at least 1");
  if (config.eval_interval < 1) {
    throw std::invalid_argument("config: eval_interval must be at least 1");
  }
  if (config.eval_episodes < 1) {
    throw std::invalid_argument("config: eval_episodes must be at least 1");
  }
  if (config.popart_step_size <= 0.0 || config.popart_step_size >= 1.0) {
    throw std::invalid_argument("config: popart_step_size must lie in (0, 1)");
  }
  for (double eps : {config.eps_eta, config.eps_alpha, config.eps_alpha_mu,
                     config.eps_alpha_sigma}) {
    if (eps != TrainConfig::kUnset && eps <= 0.0) {
      throw std::invalid_argument("config: constraint bounds must be positive");
    }
  }
}

LagrangeState resolve_lagrange(const TrainConfig& config, ActionSpace::Kind kind) {
  LagrangeState s;
  s.decoupled = kind == ActionSpace::Kind::kContinuous;
  s.eta = config.init_eta;
  s.alpha = config.init_alpha;
  s.alpha_mu = config.init_alpha_mu;
  s.alpha_sigma = config.init_alpha_sigma;
  if (s.decoupled) {
    s.eps_eta = config.eps_eta == TrainConfig::kUnset ? 0.01 : config.eps_eta;
    s.eps_alpha_mu = config.eps_alpha_mu == TrainConfig::kUnset ? 0.05 : config.eps_alpha_mu;
    s.eps_alpha_sigma =
        config.eps_alpha_sigma == TrainConfig::kUnset ? 1e-5 : config.eps_alpha_sigma;
  } else {
    s.eps_eta = config.eps_eta == TrainConfig::kUnset ? 0.1 : config.eps_eta;
    s.eps_alpha = config.eps_alpha == TrainConfig::kUnset ? 5e-3 : config.eps_alpha;
  }
  return s;
}

std::string config_reference() {
  return
      "# Training configuration keys (key=value lines, '#' comments).\n"
      "env=chain                 # environment: chain | cartpole | pointmass\n"
      "env.length=5              # chain: number of states (>= 2)\n"
      "env.slip=0                # chain: action slip probability in [0, 1)\n"
      "env.reward_scale=1        # chain: multiplies all rewards\n"
      "env.dim=2                 # pointmass: action/position dimension\n"
      "env.dt=0.05               # pointmass: integration step\n"
      "env.horizon=100           # pointmass: episode length\n"
      "gamma=0.99                # discount factor in (0, 1)\n"
      "unroll_length=16          # steps per unroll (n)\n"
      "num_unrolls=64            # unrolls per batch\n"
      "actors=1                  # parallel actor streams (divides the batch)\n"
      "learn_steps=1000          # optimizer steps to run\n"
      "t_target=10               # snapshot refresh period in learn steps\n"
      "learning_rate=0.0001      # Adam step size\n"
      "seed=0                    # master seed; identical seeds reproduce runs\n"
      "eval_interval=50          # learn steps between evaluations\n"
      "eval_episodes=20          # episodes per evaluation\n"
      "eval_mode_actions=1       # evaluate with mode/mean actions instead of samples\n"
      "out_dir=out               # output directory for metrics and checkpoints\n"
      "importance_weighting=0    # clipped importance weights for stale behavior data\n"
      "popart_step_size=0.0001   # value normalization statistics step size\n"
      "eps_eta=<by env kind>     # temperature bound; default 0.1 discrete, 0.01 continuous\n"
      "eps_alpha=<by env kind>   # trust-region bound (discrete); default 0.005\n"
      "eps_alpha_mu=<by env kind>    # mean trust-region bound (continuous); default 0.05\n"
      "eps_alpha_sigma=<by env kind> # stddev trust-region bound (continuous); default 1e-5\n"
      "init_eta=1.0              # initial temperature\n"
      "init_alpha=5.0            # initial trust-region multiplier (discrete)\n"
      "init_alpha_mu=1.0         # initial mean multiplier (continuous)\n"
      "init_alpha_sigma=1.0      # initial stddev multiplier (continuous)\n";
}

}  // namespace vmpo
