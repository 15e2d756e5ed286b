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

#include "vmpo/rollout.hpp"

#include <stdexcept>
#include <thread>

#include "vmpo/distributions.hpp"

namespace vmpo {

bool target_gate(std::uint64_t learn_step, std::uint64_t t_target) {
  if (t_target < 1) throw std::invalid_argument("target_gate: t_target must be at least 1");
  return learn_step % t_target == 0;
}

ActorState ActorState::make(EnvFactory factory, std::uint64_t seed) {
  ActorState actor;
  actor.env = factory();
  actor.rng.seed(seed);
  return actor;
}

TrajectoryUnroll collect_unroll(const AgentNet& net, const ParameterSnapshot& snapshot,
                                ActorState& actor, int n) {
  if (n < 1) throw std::invalid_argument("collect_unroll: unroll length must be at least 1");

  TrajectoryUnroll unroll;
  unroll.task_id = actor.env->task_id();
  unroll.snapshot_version = snapshot.version;

  if (actor.need_reset) {
    actor.pending_obs = actor.env->reset(actor.rng());
    actor.need_reset = false;
  }
  unroll.observations.push_back(actor.pending_obs);

  for (int t = 0; t < n; ++t) {
    const AgentNet::RawOutput out = net.act(snapshot.flat, actor.pending_obs);
    Action action;
    double log_p = 0.0;
    if (const auto* cat = std::get_if<CategoricalParams>(&out.policy)) {
      const int a = sample(*cat, actor.rng);
      log_p = log_prob(*cat, a);
      action = a;
    } else {
      const auto& gauss = std::get<DiagGaussianParams>(out.policy);
      std::vector<double> a = sample(gauss, actor.rng);
      // Log-prob of the raw sample; the environment clips at its boundary.
      log_p = log_prob(gauss, a);
      action = std::move(a);
    }

    StepResult step;
    try {
      step = actor.env->step(action);
    } catch (const std::exception& e) {
      throw std::runtime_error("collect_unroll: env " + actor.env->name() + " failed at step " +
                               std::to_string(t) + ": " + e.what());
    }
    unroll.actions.push_back(std::move(action));
    unroll.rewards.push_back(step.reward);
    unroll.behavior_log_probs.push_back(log_p);
    actor.pending_obs = std::move(step.observation);
    unroll.observations.push_back(actor.pending_obs);
    if (step.terminal) {
      unroll.terminal = true;
      actor.need_reset = true;
      break;
    }
  }
  return unroll;
}

RolloutBatch generate_batch(const AgentNet& net, const ParameterSnapshot& snapshot,
                            std::vector<ActorState>& actors, int num_unrolls, int n,
                            bool parallel) {
  if (actors.empty()) throw std::invalid_argument("generate_batch: no actors");
  if (num_unrolls < 1) throw std::invalid_argument("generate_batch: need at least one unroll");

  const std::size_t k = actors.size();
  std::vector<std::size_t> counts(k, num_unrolls / k);
  for (std::size_t i = 0; i < static_cast<std::size_t>(num_unrolls) % k; ++i) counts[i] += 1;
  std::vector<std::size_t> offsets(k, 0);
  for (std::size_t i = 1; i < k; ++i) offsets[i] = offsets[i - 1] + counts[i - 1];

  RolloutBatch batch;
  batch.snapshot_version = snapshot.version;
  batch.unrolls.resize(num_unrolls);

  auto run_actor = [&](std::size_t i) {
    for (std::size_t j = 0; j < counts[i]; ++j) {
      batch.unrolls[offsets[i] + j] = collect_unroll(net, snapshot, actors[i], n);
    }
  };

  if (parallel && k > 1) {
    std::vector<std::thread> threads;
    threads.reserve(k);
    for (std::size_t i = 0; i < k; ++i) threads.emplace_back(run_actor, i);
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t i = 0; i < k; ++i) run_actor(i);
  }
  return batch;
}

RolloutBatch generate_batch(const AgentNet& net, const ParameterSnapshot& snapshot,
                            const EnvFactory& env_factory, int num_unrolls, int n,
                            RngEngine& rng) {
  std::vector<ActorState> actors;
  actors.push_back(ActorState::make(env_factory, rng()));
  return generate_batch(net, snapshot, actors, num_unrolls, n, /*parallel=*/false);
}

}  // namespace vmpo
