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

#include "vmpo/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmpo {

namespace {

constexpr double kHalfLog2Pi = 0.5 * 1.8378770664093454836;

double clamp_floor(double v) { return std::max(v, LagrangeState::kFloor); }

std::vector<double> log_probs_of(const CategoricalParams& c) {
  double m = c.logits[0];
  for (double x : c.logits) m = std::max(m, x);
  double acc = 0.0;
  for (double x : c.logits) acc += std::exp(x - m);
  const double lse = m + std::log(acc);
  std::vector<double> lp(c.logits.size());
  for (std::size_t i = 0; i < lp.size(); ++i) lp[i] = c.logits[i] - lse;
  return lp;
}

}  // namespace

void register_multipliers(ParameterStore& store, const LagrangeState& init) {
  store.add(kEtaEntry, {});
  store.set_scalar(kEtaEntry, init.eta);
  if (init.decoupled) {
    store.add(kAlphaMuEntry, {});
    store.add(kAlphaSigmaEntry, {});
    store.set_scalar(kAlphaMuEntry, init.alpha_mu);
    store.set_scalar(kAlphaSigmaEntry, init.alpha_sigma);
  } else {
    store.add(kAlphaEntry, {});
    store.set_scalar(kAlphaEntry, init.alpha);
  }
}

LagrangeState read_multipliers(const ParameterStore& store, const LagrangeState& like) {
  LagrangeState out = like;
  out.eta = store.get_scalar(kEtaEntry);
  if (like.decoupled) {
    out.alpha_mu = store.get_scalar(kAlphaMuEntry);
    out.alpha_sigma = store.get_scalar(kAlphaSigmaEntry);
  } else {
    out.alpha = store.get_scalar(kAlphaEntry);
  }
  return out;
}

LagrangeState project_multipliers(LagrangeState state) {
  state.eta = clamp_floor(state.eta);
  state.alpha = clamp_floor(state.alpha);
  state.alpha_mu = clamp_floor(state.alpha_mu);
  state.alpha_sigma = clamp_floor(state.alpha_sigma);
  return state;
}

void project_multipliers(ParameterStore& store) {
  for (const char* name : {kEtaEntry, kAlphaEntry, kAlphaMuEntry, kAlphaSigmaEntry}) {
    if (store.has(name)) store.set_scalar(name, clamp_floor(store.get_scalar(name)));
  }
}

SelectionMask select_top_half(std::span<const double> advantages) {
  if (advantages.empty()) {
    throw std::invalid_argument("select_top_half: empty batch");
  }
  for (double a : advantages) {
    if (!std::isfinite(a)) throw std::invalid_argument("select_top_half: non-finite advantage");
  }
  const std::size_t n = advantages.size();
  const std::size_t k = (n + 1) / 2;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (advantages[i] != advantages[j]) return advantages[i] > advantages[j];
    return i < j;
  });
  SelectionMask mask;
  mask.selected.assign(n, 0);
  mask.count = k;
  for (std::size_t i = 0; i < k; ++i) mask.selected[order[i]] = 1;
  return mask;
}

std::vector<double> psi_weights(std::span<const double> selected_advantages, double eta,
                                std::span<const double> log_rho) {
  if (selected_advantages.empty()) {
    throw std::invalid_argument("psi_weights: empty selection");
  }
  if (eta < LagrangeState::kFloor) {
    throw std::invalid_argument("psi_weights: eta below positivity floor");
  }
  if (!log_rho.empty() && log_rho.size() != selected_advantages.size()) {
    throw std::invalid_argument("psi_weights: log_rho length mismatch");
  }
  const std::size_t k = selected_advantages.size();
  std::vector<double> exponent(k);
  for (std::size_t i = 0; i < k; ++i) {
    exponent[i] = selected_advantages[i] / eta + (log_rho.empty() ? 0.0 : log_rho[i]);
  }
  double m = exponent[0];
  for (double x : exponent) m = std::max(m, x);
  double acc = 0.0;
  for (double x : exponent) acc += std::exp(x - m);
  const double lse = m + std::log(acc);
  std::vector<double> psi(k);
  for (std::size_t i = 0; i < k; ++i) psi[i] = std::exp(exponent[i] - lse);
  return psi;
}

std::vector<double> importance_weights(std::span<const double> log_pi_old,
                                       std::span<const double> log_pi_behavior) {
  if (log_pi_old.size() != log_pi_behavior.size()) {
    throw std::invalid_argument("importance_weights: length mismatch");
  }
  std::vector<double> rho(log_pi_old.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!std::isfinite(log_pi_old[i]) || !std::isfinite(log_pi_behavior[i])) {
      throw std::invalid_argument("importance_weights: non-finite log-prob");
    }
    rho[i] = std::min(1.0, std::exp(log_pi_old[i] - log_pi_behavior[i]));
  }
  return rho;
}

NodeRef policy_loss(Graph& g, std::span<const double> psi, NodeRef log_probs) {
  if (static_cast<std::int64_t>(psi.size()) != log_probs->data.size()) {
    throw std::invalid_argument("policy_loss: psi/log_probs length mismatch");
  }
  NodeRef w = g.constant(
      Tensor({static_cast<int>(psi.size())}, std::vector<double>(psi.begin(), psi.end())));
  return ad::neg(ad::sum(ad::mul(w, log_probs)));
}

NodeRef temperature_loss(Graph& g, NodeRef eta, std::span<const double> selected_advantages,
                         double eps_eta, std::span<const double> log_rho) {
  if (selected_advantages.empty()) {
    throw std::invalid_argument("temperature_loss: empty selection");
  }
  if (eps_eta <= 0.0) throw std::invalid_argument("temperature_loss: eps_eta must be positive");
  const int k = static_cast<int>(selected_advantages.size());
  NodeRef adv = g.constant(Tensor(
      {k}, std::vector<double>(selected_advantages.begin(), selected_advantages.end())));
  NodeRef scaled = ad::div(adv, eta);
  if (!log_rho.empty()) {
    if (log_rho.size() != selected_advantages.size()) {
      throw std::invalid_argument("temperature_loss: log_rho length mismatch");
    }
    scaled = ad::add(scaled, g.constant(Tensor(
                                 {k}, std::vector<double>(log_rho.begin(), log_rho.end()))));
  }
  NodeRef lse = ad::logsumexp(scaled);
  NodeRef log_mean = ad::sub(lse, g.constant(std::log(static_cast<double>(k))));
  return ad::add(ad::mul(eta, g.constant(eps_eta)), ad::mul(eta, log_mean));
}

NodeRef alpha_loss(Graph& g, NodeRef alpha, NodeRef kl_per_state, double eps_alpha) {
  if (eps_alpha <= 0.0) throw std::invalid_argument("alpha_loss: eps_alpha must be positive");
  NodeRef eps = g.constant(eps_alpha);
  NodeRef penalty = ad::mul(alpha, ad::sub(eps, ad::stop_gradient(kl_per_state)));
  NodeRef pull = ad::mul(ad::stop_gradient(alpha), kl_per_state);
  return ad::mean(ad::add(penalty, pull));
}

NodeRef decoupled_alpha_losses(Graph& g, NodeRef alpha_mu, NodeRef alpha_sigma,
                               NodeRef mean_kls, NodeRef cov_kls, double eps_alpha_mu,
                               double eps_alpha_sigma) {
  return ad::add(alpha_loss(g, alpha_mu, mean_kls, eps_alpha_mu),
                 alpha_loss(g, alpha_sigma, cov_kls, eps_alpha_sigma));
}

NodeRef value_loss(Graph& g, NodeRef values, std::span<const double> targets) {
  if (static_cast<std::int64_t>(targets.size()) != values->data.size()) {
    throw std::invalid_argument("value_loss: values/targets length mismatch");
  }
  NodeRef t = g.constant(Tensor({static_cast<int>(targets.size())},
                                std::vector<double>(targets.begin(), targets.end())));
  return ad::mul(g.constant(0.5), ad::mean(ad::square(ad::sub(values, t))));
}

NodeRef total_loss(Graph& g, std::span<const NodeRef> components) {
  if (components.empty()) throw std::invalid_argument("total_loss: no components");
  (void)g;
  NodeRef total = components[0];
  for (std::size_t i = 1; i < components.size(); ++i) total = ad::add(total, components[i]);
  return total;
}

NodeRef categorical_log_probs(Graph& g, NodeRef logits, std::span<const int> actions) {
  const int b = logits->data.rows();
  const int a = logits->data.cols();
  if (static_cast<int>(actions.size()) != b) {
    throw std::invalid_argument("categorical_log_probs: batch size mismatch");
  }
  Tensor onehot({b, a});
  for (int i = 0; i < b; ++i) {
    if (actions[i] < 0 || actions[i] >= a) {
      throw std::invalid_argument("categorical_log_probs: action out of range");
    }
    onehot.at(i, actions[i]) = 1.0;
  }
  NodeRef picked = ad::sum(ad::mul(g.constant(std::move(onehot)), logits), ReduceAxis::kLast);
  return ad::sub(picked, ad::logsumexp(logits));
}

NodeRef gaussian_log_probs(Graph& g, NodeRef mean, NodeRef stddev,
                           const std::vector<std::vector<double>>& actions) {
  const int b = mean->data.rows();
  const int d = mean->data.cols();
  if (static_cast<int>(actions.size()) != b) {
    throw std::invalid_argument("gaussian_log_probs: batch size mismatch");
  }
  Tensor act({b, d});
  for (int i = 0; i < b; ++i) {
    if (static_cast<int>(actions[i].size()) != d) {
      throw std::invalid_argument("gaussian_log_probs: action dimension mismatch");
    }
    for (int j = 0; j < d; ++j) act.at(i, j) = actions[i][j];
  }
  NodeRef z = ad::div(ad::sub(g.constant(std::move(act)), mean), stddev);
  NodeRef terms = ad::sub(ad::mul(g.constant(-0.5), ad::square(z)), ad::log(stddev));
  return ad::add(ad::sum(terms, ReduceAxis::kLast), g.constant(-d * kHalfLog2Pi));
}

NodeRef categorical_kl_nodes(Graph& g, NodeRef logits,
                             const std::vector<CategoricalParams>& old_policy) {
  const int b = logits->data.rows();
  const int a = logits->data.cols();
  if (static_cast<int>(old_policy.size()) != b) {
    throw std::invalid_argument("categorical_kl_nodes: batch size mismatch");
  }
  Tensor p_old({b, a});
  Tensor neg_entropy({b});
  for (int i = 0; i < b; ++i) {
    if (static_cast<int>(old_policy[i].logits.size()) != a) {
      throw std::invalid_argument("categorical_kl_nodes: action count mismatch");
    }
    const std::vector<double> lp = log_probs_of(old_policy[i]);
    double acc = 0.0;
    for (int j = 0; j < a; ++j) {
      const double p = std::exp(lp[j]);
      p_old.at(i, j) = p;
      acc += p * lp[j];
    }
    neg_entropy[i] = acc;
  }
  // KL_s = sum_a p_old (log p_old - log softmax(logits))
  //      = sum_a p_old log p_old - sum_a p_old logits_a + lse(logits).
  NodeRef cross = ad::sum(ad::mul(g.constant(std::move(p_old)), logits), ReduceAxis::kLast);
  return ad::add(ad::sub(g.constant(std::move(neg_entropy)), cross), ad::logsumexp(logits));
}

NodeRef gaussian_mean_kl_nodes(Graph& g, NodeRef mean,
                               const std::vector<DiagGaussianParams>& old_policy) {
  const int b = mean->data.rows();
  const int d = mean->data.cols();
  if (static_cast<int>(old_policy.size()) != b) {
    throw std::invalid_argument("gaussian_mean_kl_nodes: batch size mismatch");
  }
  Tensor mu_old({b, d});
  Tensor half_inv_var({b, d});
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < d; ++j) {
      mu_old.at(i, j) = old_policy[i].mean[j];
      const double s = old_policy[i].stddev[j];
      half_inv_var.at(i, j) = 0.5 / (s * s);
    }
  }
  NodeRef diff = ad::sub(mean, g.constant(std::move(mu_old)));
  return ad::sum(ad::mul(g.constant(std::move(half_inv_var)), ad::square(diff)),
                 ReduceAxis::kLast);
}

NodeRef gaussian_cov_kl_nodes(Graph& g, NodeRef stddev,
                              const std::vector<DiagGaussianParams>& old_policy) {
  const int b = stddev->data.rows();
  const int d = stddev->data.cols();
  if (static_cast<int>(old_policy.size()) != b) {
    throw std::invalid_argument("gaussian_cov_kl_nodes: batch size mismatch");
  }
  Tensor var_old({b, d});
  Tensor offset({b});  // -d/2 - sum_j log sigma_old
  for (int i = 0; i < b; ++i) {
    double acc = -0.5 * d;
    for (int j = 0; j < d; ++j) {
      const double s = old_policy[i].stddev[j];
      var_old.at(i, j) = s * s;
      acc -= std::log(s);
    }
    offset[i] = acc;
  }
  // KL_s = 1/2 sum_j var_old / sigma^2 - d/2 + sum_j log sigma - sum_j log sigma_old.
  NodeRef trace = ad::sum(ad::div(g.constant(std::move(var_old)), ad::square(stddev)),
                          ReduceAxis::kLast);
  NodeRef log_det = ad::sum(ad::log(stddev), ReduceAxis::kLast);
  return ad::add(ad::add(ad::mul(g.constant(0.5), trace), log_det),
                 g.constant(std::move(offset)));
}

NodeRef select_task_channel(Graph& g, NodeRef values, std::span<const int> task_ids) {
  const int b = values->data.rows();
  const int t = values->data.cols();
  if (static_cast<int>(task_ids.size()) != b) {
    throw std::invalid_argument("select_task_channel: batch size mismatch");
  }
  Tensor onehot({b, t});
  for (int i = 0; i < b; ++i) {
    if (task_ids[i] < 0 || task_ids[i] >= t) {
      throw std::invalid_argument("select_task_channel: task id out of range");
    }
    onehot.at(i, task_ids[i]) = 1.0;
  }
  return ad::sum(ad::mul(g.constant(std::move(onehot)), values), ReduceAxis::kLast);
}

VmpoLoss build_vmpo_loss(Graph& g, const AgentNet& net, const std::vector<NodeRef>& leaves,
                         const VmpoLossLeaves& multipliers, const VmpoBatchData& batch,
                         const LagrangeState& settings) {
  const std::size_t b = batch.advantages.size();
  if (b == 0) throw std::invalid_argument("build_vmpo_loss: empty batch");
  const bool discrete = net.spec().action_space.kind == ActionSpace::Kind::kDiscrete;

  NodeRef obs = g.constant(batch.observations);
  PolicyValueNodes out = net.forward_graph(g, leaves, obs);

  // E-step: one selection shared by the policy and temperature losses.
  VmpoLoss result;
  result.mask = select_top_half(batch.advantages);

  std::vector<double> selected_adv;
  std::vector<double> selected_log_rho;
  std::vector<std::size_t> selected_idx;
  selected_adv.reserve(result.mask.count);
  std::vector<double> rho;
  if (batch.use_importance_weights) {
    rho = importance_weights(batch.target_log_probs, batch.behavior_log_probs);
  }
  for (std::size_t i = 0; i < b; ++i) {
    if (!result.mask.selected[i]) continue;
    selected_idx.push_back(i);
    selected_adv.push_back(batch.advantages[i]);
    if (batch.use_importance_weights) selected_log_rho.push_back(std::log(rho[i]));
  }

  const double eta_value = multipliers.eta->data.value();
  const std::vector<double> psi_selected =
      psi_weights(selected_adv, eta_value, selected_log_rho);
  result.psi.assign(b, 0.0);
  for (std::size_t i = 0; i < selected_idx.size(); ++i) {
    result.psi[selected_idx[i]] = psi_selected[i];
  }

  NodeRef log_probs = discrete
                          ? categorical_log_probs(g, out.logits, batch.discrete_actions)
                          : gaussian_log_probs(g, out.mean, out.stddev,
                                               batch.continuous_actions);
  NodeRef l_pi = policy_loss(g, result.psi, log_probs);
  NodeRef l_eta = temperature_loss(g, multipliers.eta, selected_adv, settings.eps_eta,
                                   selected_log_rho);

  NodeRef l_alpha = nullptr;
  double mean_kl = 0.0;
  ObjectiveDiagnostics& diag = result.diag;
  if (discrete) {
    std::vector<CategoricalParams> old_policy(b);
    for (std::size_t i = 0; i < b; ++i) {
      old_policy[i] = std::get<CategoricalParams>(batch.old_policy[i]);
    }
    NodeRef kls = categorical_kl_nodes(g, out.logits, old_policy);
    l_alpha = alpha_loss(g, multipliers.alpha, kls, settings.eps_alpha);
    for (std::int64_t i = 0; i < kls->data.size(); ++i) mean_kl += kls->data[i];
    mean_kl /= static_cast<double>(b);
    diag.loss_alpha = l_alpha->data.value();
  } else {
    std::vector<DiagGaussianParams> old_policy(b);
    for (std::size_t i = 0; i < b; ++i) {
      old_policy[i] = std::get<DiagGaussianParams>(batch.old_policy[i]);
    }
    NodeRef mean_kls = gaussian_mean_kl_nodes(g, out.mean, old_policy);
    NodeRef cov_kls = gaussian_cov_kl_nodes(g, out.stddev, old_policy);
    NodeRef l_mu = alpha_loss(g, multipliers.alpha_mu, mean_kls, settings.eps_alpha_mu);
    NodeRef l_sigma =
        alpha_loss(g, multipliers.alpha_sigma, cov_kls, settings.eps_alpha_sigma);
    l_alpha = ad::add(l_mu, l_sigma);
    for (std::int64_t i = 0; i < mean_kls->data.size(); ++i) {
      mean_kl += mean_kls->data[i] + cov_kls->data[i];
    }
    mean_kl /= static_cast<double>(b);
    diag.loss_alpha_mu = l_mu->data.value();
    diag.loss_alpha_sigma = l_sigma->data.value();
    diag.loss_alpha = diag.loss_alpha_mu + diag.loss_alpha_sigma;
  }

  NodeRef v_hat = select_task_channel(g, out.values, batch.task_ids);
  NodeRef l_v = value_loss(g, v_hat, batch.normalized_targets);

  const NodeRef components[] = {l_v, l_pi, l_eta, l_alpha};
  result.total = total_loss(g, components);

  diag.loss_value = l_v->data.value();
  diag.loss_policy = l_pi->data.value();
  diag.loss_eta = l_eta->data.value();
  diag.total = result.total->data.value();
  diag.mean_kl = mean_kl;
  diag.selected_count = result.mask.count;
  diag.batch_size = b;
  double abs_adv = 0.0;
  for (double a : batch.advantages) abs_adv += std::abs(a);
  diag.mean_abs_advantage = abs_adv / static_cast<double>(b);
  for (double t : batch.normalized_targets) {
    diag.max_abs_normalized_target = std::max(diag.max_abs_normalized_target, std::abs(t));
  }
  return result;
}

}  // namespace vmpo
