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

#ifndef VMPO_AGENT_NET_HPP_
#define VMPO_AGENT_NET_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "vmpo/autodiff.hpp"
#include "vmpo/distributions.hpp"
#include "vmpo/env.hpp"
#include "vmpo/param_store.hpp"
#include "vmpo/popart.hpp"

namespace vmpo {

inline constexpr double kStddevFloor = 1e-4;

struct NetSpec {
  int obs_dim = 0;
  ActionSpace action_space;
  int num_tasks = 1;
  int trunk_width = 64;  // two tanh layers
  int head_width = 64;   // one tanh layer per head
};

// Frozen copy of all parameters; versions increase strictly across
// snapshots taken from the same net.
struct ParameterSnapshot {
  std::vector<double> flat;
  std::uint64_t version = 0;
};

// Graph outputs of one batched forward pass. Categorical policies populate
// logits; Gaussian policies populate mean and stddev.
struct PolicyValueNodes {
  NodeRef logits = nullptr;  // [B, actions]
  NodeRef mean = nullptr;    // [B, dim]
  NodeRef stddev = nullptr;  // [B, dim]
  NodeRef values = nullptr;  // [B, num_tasks], normalized space
};

// Shared-trunk policy/value MLP. The value head emits one normalized value
// per task channel. Policy and value parameters share the trunk; advantage
// targets are computed outside the graph, so the policy-improvement losses
// never reach the value readout.
class AgentNet {
 public:
  AgentNet(NetSpec spec, std::uint64_t init_seed);

  const NetSpec& spec() const { return spec_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  // Builds the batched forward pass on an existing graph. `leaves` must hold
  // one leaf per store entry in registration order (extra trailing entries,
  // e.g. Lagrange multipliers, are ignored here).
  PolicyValueNodes forward_graph(Graph& g, const std::vector<NodeRef>& leaves,
                                 NodeRef observations) const;

  struct RawOutput {
    PolicyParams policy;
    std::vector<double> values;  // normalized, one per task
  };

  // Graph-free forward for a single observation against any flat parameter
  // vector with this net's layout. Uses the same kernels as the graph path.
  RawOutput act(std::span<const double> flat, std::span<const double> observation) const;

  ParameterSnapshot snapshot();
  std::uint64_t next_snapshot_version() const { return next_version_; }
  void set_next_snapshot_version(std::uint64_t v) { next_version_ = v; }

  // Rescales the value readout so denormalized predictions are preserved
  // when the normalization statistics move from old_stats to new_stats.
  void popart_compensate(const PopArtStats& old_stats, const PopArtStats& new_stats);

 private:
  NetSpec spec_;
  ParameterStore params_;
  std::uint64_t next_version_ = 1;

  // Entry indices into params_.
  std::size_t trunk_w0_, trunk_b0_, trunk_w1_, trunk_b1_;
  std::size_t policy_hw_, policy_hb_, policy_ow_, policy_ob_;
  std::size_t value_hw_, value_hb_, value_ow_, value_ob_;

  int policy_out_dim() const;
};

}  // namespace vmpo

#endif  // VMPO_AGENT_NET_HPP_
