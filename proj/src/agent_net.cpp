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

#include "vmpo/agent_net.hpp"

#include <cmath>
#include <stdexcept>

#include "vmpo/rng.hpp"

namespace vmpo {

namespace {

// Fan-in scaled uniform init; limit = gain * sqrt(3 / fan_in) gives column
// variance gain^2 / fan_in.
void init_weight(std::span<double> w, int fan_in, double gain, RngEngine& rng) {
  const double limit = gain * std::sqrt(3.0 / static_cast<double>(fan_in));
  for (double& x : w) x = draw_uniform(rng, -limit, limit);
}

}  // namespace

AgentNet::AgentNet(NetSpec spec, std::uint64_t init_seed) : spec_(spec) {
  if (spec_.obs_dim < 1 || spec_.num_tasks < 1 || spec_.action_space.size < 1) {
    throw std::invalid_argument("AgentNet: invalid spec");
  }
  const int w = spec_.trunk_width;
  const int hw = spec_.head_width;
  const int out = policy_out_dim();

  trunk_w0_ = params_.add("trunk.w0", {spec_.obs_dim, w});
  trunk_b0_ = params_.add("trunk.b0", {w});
  trunk_w1_ = params_.add("trunk.w1", {w, w});
  trunk_b1_ = params_.add("trunk.b1", {w});
  policy_hw_ = params_.add("policy.hidden_w", {w, hw});
  policy_hb_ = params_.add("policy.hidden_b", {hw});
  policy_ow_ = params_.add("policy.out_w", {hw, out});
  policy_ob_ = params_.add("policy.out_b", {out});
  value_hw_ = params_.add("value.hidden_w", {w, hw});
  value_hb_ = params_.add("value.hidden_b", {hw});
  value_ow_ = params_.add("value.out_w", {hw, spec_.num_tasks});
  value_ob_ = params_.add("value.out_b", {spec_.num_tasks});

  RngEngine rng(init_seed);
  init_weight(params_.slice(trunk_w0_), spec_.obs_dim, 1.0, rng);
  init_weight(params_.slice(trunk_w1_), w, 1.0, rng);
  init_weight(params_.slice(policy_hw_), w, 1.0, rng);
  init_weight(params_.slice(policy_ow_), hw, 0.01, rng);
  init_weight(params_.slice(value_hw_), w, 1.0, rng);
  init_weight(params_.slice(value_ow_), hw, 1.0, rng);

  if (spec_.action_space.kind == ActionSpace::Kind::kContinuous) {
    // Bias of the pre-softplus stddev outputs, placed so the initial
    // stddev is 0.5 after the softplus-plus-floor mapping.
    const double bias = std::log(std::expm1(0.5 - kStddevFloor));
    auto ob = params_.slice(policy_ob_);
    for (int i = spec_.action_space.size; i < out; ++i) ob[i] = bias;
  }
}

int AgentNet::policy_out_dim() const {
  return spec_.action_space.kind == ActionSpace::Kind::kDiscrete
             ? spec_.action_space.size
             : 2 * spec_.action_space.size;
}

PolicyValueNodes AgentNet::forward_graph(Graph& g, const std::vector<NodeRef>& leaves,
                                         NodeRef observations) const {
  if (leaves.size() < params_.entry_count()) {
    throw std::invalid_argument("AgentNet::forward_graph: missing parameter leaves");
  }
  if (observations->data.rank() != 2 || observations->data.cols() != spec_.obs_dim) {
    throw std::invalid_argument("AgentNet::forward_graph: observation batch has shape " +
                                Tensor::shape_string(observations->data.shape()) +
                                ", expected [*, " + std::to_string(spec_.obs_dim) + "]");
  }
  NodeRef h = ad::tanh(ad::affine(observations, leaves[trunk_w0_], leaves[trunk_b0_]));
  h = ad::tanh(ad::affine(h, leaves[trunk_w1_], leaves[trunk_b1_]));

  NodeRef p = ad::tanh(ad::affine(h, leaves[policy_hw_], leaves[policy_hb_]));
  NodeRef pol = ad::affine(p, leaves[policy_ow_], leaves[policy_ob_]);

  NodeRef v = ad::tanh(ad::affine(h, leaves[value_hw_], leaves[value_hb_]));
  NodeRef values = ad::affine(v, leaves[value_ow_], leaves[value_ob_]);

  PolicyValueNodes out;
  out.values = values;
  if (spec_.action_space.kind == ActionSpace::Kind::kDiscrete) {
    out.logits = pol;
  } else {
    const int d = spec_.action_space.size;
    out.mean = ad::slice(pol, 0, d);
    NodeRef pre = ad::slice(pol, d, d);
    // softplus(x) = m + log(exp(x - m) + exp(-m)), m = max(x, 0); matches
    // kernels::softplus bit for bit.
    NodeRef m = ad::max(pre, g.constant(0.0));
    NodeRef sp = ad::add(m, ad::log(ad::add(ad::exp(ad::sub(pre, m)), ad::exp(ad::neg(m)))));
    out.stddev = ad::add(sp, g.constant(kStddevFloor));
  }
  return out;
}

AgentNet::RawOutput AgentNet::act(std::span<const double> flat,
                                  std::span<const double> observation) const {
  if (flat.size() != params_.flat_size()) {
    throw std::invalid_argument("AgentNet::act: flat parameter size mismatch");
  }
  if (static_cast<int>(observation.size()) != spec_.obs_dim) {
    throw std::invalid_argument("AgentNet::act: observation has dimension " +
                                std::to_string(observation.size()) + ", expected " +
                                std::to_string(spec_.obs_dim));
  }
  auto param = [&](std::size_t idx) {
    const auto& e = params_.entry(idx);
    return Tensor(e.shape,
                  std::vector<double>(flat.begin() + e.offset, flat.begin() + e.offset + e.size));
  };
  Tensor obs({1, spec_.obs_dim},
             std::vector<double>(observation.begin(), observation.end()));

  Tensor h = kernels::tanh(kernels::affine(obs, param(trunk_w0_), param(trunk_b0_)));
  h = kernels::tanh(kernels::affine(h, param(trunk_w1_), param(trunk_b1_)));
  Tensor p = kernels::tanh(kernels::affine(h, param(policy_hw_), param(policy_hb_)));
  Tensor pol = kernels::affine(p, param(policy_ow_), param(policy_ob_));
  Tensor v = kernels::tanh(kernels::affine(h, param(value_hw_), param(value_hb_)));
  Tensor values = kernels::affine(v, param(value_ow_), param(value_ob_));

  RawOutput out;
  out.values.assign(values.data(), values.data() + values.size());
  if (spec_.action_space.kind == ActionSpace::Kind::kDiscrete) {
    CategoricalParams c;
    c.logits.assign(pol.data(), pol.data() + pol.size());
    out.policy = std::move(c);
  } else {
    const int d = spec_.action_space.size;
    DiagGaussianParams gge;
    gge.mean.assign(pol.data(), pol.data() + d);
    gge.stddev.resize(d);
    for (int i = 0; i < d; ++i) {
      gge.stddev[i] = kernels::softplus(pol[d + i]) + kStddevFloor;
    }
    out.policy = std::move(gge);
  }
  return out;
}

ParameterSnapshot AgentNet::snapshot() {
  ParameterSnapshot s;
  s.flat = params_.flat();
  s.version = next_version_++;
  return s;
}

void AgentNet::popart_compensate(const PopArtStats& old_stats, const PopArtStats& new_stats) {
  if (old_stats.num_tasks() != spec_.num_tasks || new_stats.num_tasks() != spec_.num_tasks) {
    throw std::invalid_argument("popart_compensate: stats channels do not match value head");
  }
  for (int t = 0; t < spec_.num_tasks; ++t) {
    if (!(old_stats.scale[t] > 0.0) || !(new_stats.scale[t] > 0.0)) {
      throw std::invalid_argument("popart_compensate: non-positive scale");
    }
  }
  auto w = params_.slice(value_ow_);
  auto b = params_.slice(value_ob_);
  const int hw = spec_.head_width;
  const int tasks = spec_.num_tasks;
  for (int t = 0; t < tasks; ++t) {
    const double ratio = old_stats.scale[t] / new_stats.scale[t];
    for (int i = 0; i < hw; ++i) w[static_cast<std::size_t>(i) * tasks + t] *= ratio;
    b[t] = (old_stats.scale[t] * b[t] + old_stats.mean[t] - new_stats.mean[t]) /
           new_stats.scale[t];
  }
}

}  // namespace vmpo
