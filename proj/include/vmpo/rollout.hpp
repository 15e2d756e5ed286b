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

#ifndef VMPO_ROLLOUT_HPP_
#define VMPO_ROLLOUT_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "vmpo/agent_net.hpp"
#include "vmpo/env.hpp"
#include "vmpo/returns.hpp"
#include "vmpo/rng.hpp"

namespace vmpo {

using EnvFactory = std::function<std::unique_ptr<EnvModel>()>;

// On-policy batch: every unroll comes from the same parameter snapshot.
struct RolloutBatch {
  std::vector<TrajectoryUnroll> unrolls;
  std::uint64_t snapshot_version = 0;

  std::size_t total_samples() const {
    std::size_t n = 0;
    for (const auto& u : unrolls) n += u.length();
    return n;
  }
};

// True exactly when the snapshot should be refreshed before this learn step.
bool target_gate(std::uint64_t learn_step, std::uint64_t t_target);

// One actor stream: a private environment plus a private generator. The
// episode in flight persists across unrolls and batches; terminals trigger a
// reseeded reset on the next unroll.
struct ActorState {
  std::unique_ptr<EnvModel> env;
  RngEngine rng;
  std::vector<double> pending_obs;
  bool need_reset = true;

  static ActorState make(EnvFactory factory, std::uint64_t seed);
};

// Collects one unroll of at most n steps, truncating at episode boundaries.
// Actions are sampled from the snapshot policy; their log-probs are recorded
// as behavior log-probs.
TrajectoryUnroll collect_unroll(const AgentNet& net, const ParameterSnapshot& snapshot,
                                ActorState& actor, int n);

// num_unrolls unrolls split evenly across the actors (actor-major order).
// Each actor touches only its own environment and generator, so the result
// does not depend on scheduling; actors run on threads when parallel is set.
RolloutBatch generate_batch(const AgentNet& net, const ParameterSnapshot& snapshot,
                            std::vector<ActorState>& actors, int num_unrolls, int n,
                            bool parallel = false);

// Convenience form over a fresh single-actor stream.
RolloutBatch generate_batch(const AgentNet& net, const ParameterSnapshot& snapshot,
                            const EnvFactory& env_factory, int num_unrolls, int n,
                            RngEngine& rng);

}  // namespace vmpo

#endif  // VMPO_ROLLOUT_HPP_
