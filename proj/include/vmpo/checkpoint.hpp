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

#ifndef VMPO_CHECKPOINT_HPP_
#define VMPO_CHECKPOINT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vmpo/adam.hpp"
#include "vmpo/agent_net.hpp"
#include "vmpo/objective.hpp"
#include "vmpo/param_store.hpp"
#include "vmpo/popart.hpp"

namespace vmpo {

// Binary training state: magic "VMPO", format version u32, then five
// length-prefixed sections (parameters, lagrange, popart, optimizer, rng)
// with all numeric payloads little-endian 64-bit. save -> load -> save is
// byte-identical; unknown versions are refused.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct ActorResume {
  std::vector<std::uint64_t> engine_words;
  std::vector<double> env_state;
  std::vector<double> pending_obs;
  bool need_reset = true;
};

struct EvalStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct Checkpoint {
  // parameters section
  std::string env_name;
  std::map<std::string, double> env_params;
  NetSpec net_spec;
  std::vector<ParameterStore::Entry> layout;
  std::vector<double> flat;
  bool has_snapshot = false;
  std::uint64_t snapshot_version = 0;
  std::vector<double> snapshot_flat;
  std::uint64_t next_snapshot_version = 1;

  // lagrange section
  LagrangeState lagrange;

  // popart section
  PopArtStats popart;

  // optimizer section
  AdamState adam;
  std::uint64_t learn_step = 0;
  std::uint64_t env_frames = 0;

  // rng section: resumption state of the actor streams and last evaluation
  std::vector<ActorResume> actors;
  bool has_eval = false;
  EvalStats last_eval;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vmpo

#endif  // VMPO_CHECKPOINT_HPP_
