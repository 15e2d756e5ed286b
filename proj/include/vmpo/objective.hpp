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

#ifndef VMPO_OBJECTIVE_HPP_
#define VMPO_OBJECTIVE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vmpo/agent_net.hpp"
#include "vmpo/autodiff.hpp"
#include "vmpo/distributions.hpp"
#include "vmpo/param_store.hpp"

namespace vmpo {

// Temperature and trust-region multipliers with their constraint bounds.
// Multipliers are projected to the positivity floor after every optimizer
// step.
struct LagrangeState {
  static constexpr double kFloor = 1e-8;

  double eta = 1.0;
  double eps_eta = 0.1;

  bool decoupled = false;  // continuous policies split the KL constraint
  double alpha = 5.0;      // coupled multiplier (discrete)
  double eps_alpha = 5e-3;
  double alpha_mu = 1.0;   // decoupled multipliers (continuous)
  double alpha_sigma = 1.0;
  double eps_alpha_mu = 0.05;
  double eps_alpha_sigma = 1e-5;
};

// Store entry names for the jointly optimized multipliers.
inline constexpr const char* kEtaEntry = "lagrange.eta";
inline constexpr const char* kAlphaEntry = "lagrange.alpha";
inline constexpr const char* kAlphaMuEntry = "lagrange.alpha_mu";
inline constexpr const char* kAlphaSigmaEntry = "lagrange.alpha_sigma";

void register_multipliers(ParameterStore& store, const LagrangeState& init);
LagrangeState read_multipliers(const ParameterStore& store, const LagrangeState& like);

// Clamp every multiplier to the positivity floor.
LagrangeState project_multipliers(LagrangeState state);
void project_multipliers(ParameterStore& store);

// Top ceil(|D|/2) advantages; ties at the threshold break toward the lower
// sample index.
struct SelectionMask {
  std::vector<std::uint8_t> selected;
  std::size_t count = 0;
};

SelectionMask select_top_half(std::span<const double> advantages);

// Normalized exp(A/eta) weights over the selected samples, computed through
// log-sum-exp. Optional per-sample log importance weights shift the
// exponents before normalization.
std::vector<double> psi_weights(std::span<const double> selected_advantages, double eta,
                                std::span<const double> log_rho = {});

// Clipped importance weights min(1, pi_old / pi_behavior) from log-probs.
std::vector<double> importance_weights(std::span<const double> log_pi_old,
                                       std::span<const double> log_pi_behavior);

// ---- Loss graph constructors ----------------------------------------------
// All constants (advantages, psi, old-policy parameters) enter the graph as
// plain numbers; gradients flow only through the parameter-dependent nodes.

// -sum_i psi[i] * log_probs[i]; psi entries are constants.
NodeRef policy_loss(Graph& g, std::span<const double> psi, NodeRef log_probs);

// eta * eps_eta + eta * log( (1/K) sum_i rho_i * exp(A_i / eta) ).
NodeRef temperature_loss(Graph& g, NodeRef eta, std::span<const double> selected_advantages,
                         double eps_eta, std::span<const double> log_rho = {});

// (1/B) sum_s [ alpha * (eps - sg[KL_s]) + sg[alpha] * KL_s ].
NodeRef alpha_loss(Graph& g, NodeRef alpha, NodeRef kl_per_state, double eps_alpha);

// Sum of one alpha_loss per decoupled KL component.
NodeRef decoupled_alpha_losses(Graph& g, NodeRef alpha_mu, NodeRef alpha_sigma,
                               NodeRef mean_kls, NodeRef cov_kls, double eps_alpha_mu,
                               double eps_alpha_sigma);

// (1 / 2B) sum_s (v[s] - target[s])^2.
NodeRef value_loss(Graph& g, NodeRef values, std::span<const double> targets);

NodeRef total_loss(Graph& g, std::span<const NodeRef> components);

// Per-sample graph vectors over a batched forward pass.
NodeRef categorical_log_probs(Graph& g, NodeRef logits, std::span<const int> actions);
NodeRef gaussian_log_probs(Graph& g, NodeRef mean, NodeRef stddev,
                           const std::vector<std::vector<double>>& actions);
NodeRef categorical_kl_nodes(Graph& g, NodeRef logits,
                             const std::vector<CategoricalParams>& old_policy);
NodeRef gaussian_mean_kl_nodes(Graph& g, NodeRef mean,
                               const std::vector<DiagGaussianParams>& old_policy);
NodeRef gaussian_cov_kl_nodes(Graph& g, NodeRef stddev,
                              const std::vector<DiagGaussianParams>& old_policy);

// values [B, T] -> [B], picking each sample's task channel.
NodeRef select_task_channel(Graph& g, NodeRef values, std::span<const int> task_ids);

// ---- Full objective --------------------------------------------------------

struct VmpoBatchData {
  Tensor observations;  // [B, obs_dim]
  std::vector<int> discrete_actions;
  std::vector<std::vector<double>> continuous_actions;
  std::vector<PolicyParams> old_policy;     // snapshot policy per state
  std::vector<double> advantages;           // return units
  std::vector<double> normalized_targets;   // value regression targets
  std::vector<int> task_ids;
  std::vector<double> behavior_log_probs;   // recorded at acting time
  std::vector<double> target_log_probs;     // recomputed under the snapshot
  bool use_importance_weights = false;
};

struct VmpoLossLeaves {
  NodeRef eta = nullptr;
  NodeRef alpha = nullptr;        // coupled
  NodeRef alpha_mu = nullptr;     // decoupled
  NodeRef alpha_sigma = nullptr;
};

struct ObjectiveDiagnostics {
  double loss_value = 0.0;
  double loss_policy = 0.0;
  double loss_eta = 0.0;
  double loss_alpha = 0.0;
  double loss_alpha_mu = 0.0;
  double loss_alpha_sigma = 0.0;
  double total = 0.0;
  double mean_kl = 0.0;  // batch mean of the trust-region KL (components summed)
  double mean_abs_advantage = 0.0;
  double max_abs_normalized_target = 0.0;
  std::size_t selected_count = 0;
  std::size_t batch_size = 0;
};

struct VmpoLoss {
  NodeRef total = nullptr;
  ObjectiveDiagnostics diag;
  SelectionMask mask;
  std::vector<double> psi;  // full-batch weights, zero off the selection
};

// Assembles the complete training loss: value regression, weighted maximum
// likelihood, temperature, and trust-region terms, sharing one selection
// mask between the policy and temperature losses.
VmpoLoss build_vmpo_loss(Graph& g, const AgentNet& net, const std::vector<NodeRef>& leaves,
                         const VmpoLossLeaves& multipliers, const VmpoBatchData& batch,
                         const LagrangeState& settings);

}  // namespace vmpo

#endif  // VMPO_OBJECTIVE_HPP_
