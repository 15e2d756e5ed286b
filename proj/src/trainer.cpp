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

#include "vmpo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "vmpo/distributions.hpp"

namespace vmpo {

namespace {

std::vector<EnvFactory> default_roster(const TrainConfig& config) {
  return {[config] { return make_env(config.env_name, config.env_params, 0); }};
}

NetSpec probe_spec(const std::vector<EnvFactory>& roster) {
  if (roster.empty()) throw std::invalid_argument("Trainer: empty env roster");
  NetSpec spec;
  int max_task = 0;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const std::unique_ptr<EnvModel> env = roster[i]();
    if (i == 0) {
      spec.obs_dim = env->observation_dim();
      spec.action_space = env->action_space();
    } else if (env->observation_dim() != spec.obs_dim ||
               env->action_space().kind != spec.action_space.kind ||
               env->action_space().size != spec.action_space.size) {
      throw std::invalid_argument("Trainer: roster envs disagree on interfaces");
    }
    max_task = std::max(max_task, env->task_id());
  }
  spec.num_tasks = max_task + 1;
  return spec;
}

Action pick_action(const PolicyParams& policy, bool mode_actions, RngEngine& rng) {
  if (const auto* cat = std::get_if<CategoricalParams>(&policy)) {
    return mode_actions ? mode(*cat) : sample(*cat, rng);
  }
  const auto& gauss = std::get<DiagGaussianParams>(policy);
  return mode_actions ? mode(gauss) : sample(gauss, rng);
}

double run_episode(const AgentNet& net, std::span<const double> flat, EnvModel& env,
                   std::uint64_t episode_seed, bool mode_actions, RngEngine& act_rng) {
  std::vector<double> obs = env.reset(episode_seed);
  double episode_return = 0.0;
  while (true) {
    const AgentNet::RawOutput out = net.act(flat, obs);
    StepResult sr = env.step(pick_action(out.policy, mode_actions, act_rng));
    episode_return += sr.reward;
    obs = std::move(sr.observation);
    if (sr.terminal) break;
  }
  return episode_return;
}

EvalStats evaluate_policy(const AgentNet& net, std::span<const double> flat, EnvModel& env,
                          int episodes, std::uint64_t seed, bool mode_actions) {
  if (episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
  EvalStats stats;
  RngEngine act_rng(derive_seed(seed, 0x5eed));
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    const double ret =
        run_episode(net, flat, env, derive_seed(seed, ep), mode_actions, act_rng);
    total += ret;
    if (ep == 0) {
      stats.min = stats.max = ret;
    } else {
      stats.min = std::min(stats.min, ret);
      stats.max = std::max(stats.max, ret);
    }
  }
  stats.mean = total / episodes;
  return stats;
}

}  // namespace

Trainer::Trainer(TrainConfig config) : Trainer(std::move(config), {}) {}

Trainer::Trainer(TrainConfig config, std::vector<EnvFactory> roster)
    : config_(std::move(config)),
      roster_(roster.empty() ? default_roster(config_) : std::move(roster)),
      lagrange_(resolve_lagrange(config_, probe_spec(roster_).action_space.kind)),
      net_(probe_spec(roster_), derive_seed(config_.seed, 1)),
      popart_(PopArtStats::init(net_.spec().num_tasks, config_.popart_step_size)) {
  validate_config(config_);
  register_multipliers(net_.params(), lagrange_);
  adam_ = AdamState::init(net_.params().flat_size());
  actors_.reserve(config_.actors);
  for (int i = 0; i < config_.actors; ++i) {
    actors_.push_back(
        ActorState::make(roster_[i % roster_.size()], derive_seed(config_.seed, 100 + i)));
  }
}

StepDiagnostics Trainer::step() {
  StepDiagnostics info;
  if (target_gate(learn_step_, config_.t_target)) {
    snapshot_ = net_.snapshot();
    has_snapshot_ = true;
    info.refreshed_snapshot = true;
  }

  RolloutBatch batch = generate_batch(net_, snapshot_, actors_, config_.num_unrolls,
                                      config_.unroll_length, config_.actors > 1);
  info.batch_samples = batch.total_samples();

  // Policy evaluation: n-step targets and advantages from the online value
  // function, all in return units, held constant for the loss graph.
  VmpoBatchData data;
  data.use_importance_weights = config_.importance_weighting;
  const std::size_t total = batch.total_samples();
  data.observations = Tensor({static_cast<int>(total), net_.spec().obs_dim});
  std::vector<double> return_targets;
  return_targets.reserve(total);
  data.advantages.reserve(total);
  data.task_ids.reserve(total);
  std::size_t row = 0;
  const std::vector<double>& online_flat = net_.params().flat();
  for (const TrajectoryUnroll& unroll : batch.unrolls) {
    unroll.validate();
    const std::size_t m = unroll.length();
    std::vector<double> values(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      const AgentNet::RawOutput out = net_.act(online_flat, unroll.observations[j]);
      values[j] =
          popart_denormalize(popart_, out.values[unroll.task_id], unroll.task_id);
    }
    const std::vector<double> returns = n_step_returns(unroll, values, config_.gamma);
    for (std::size_t t = 0; t < m; ++t) {
      for (int c = 0; c < net_.spec().obs_dim; ++c) {
        data.observations.at(static_cast<int>(row), c) = unroll.observations[t][c];
      }
      const AgentNet::RawOutput snap_out = net_.act(snapshot_.flat, unroll.observations[t]);
      double target_lp = 0.0;
      if (const auto* cat = std::get_if<CategoricalParams>(&snap_out.policy)) {
        const int a = std::get<int>(unroll.actions[t]);
        data.discrete_actions.push_back(a);
        target_lp = log_prob(*cat, a);
      } else {
        const auto& gauss = std::get<DiagGaussianParams>(snap_out.policy);
        const auto& a = std::get<std::vector<double>>(unroll.actions[t]);
        data.continuous_actions.push_back(a);
        target_lp = log_prob(gauss, a);
      }
      data.old_policy.push_back(snap_out.policy);
      data.target_log_probs.push_back(target_lp);
      data.behavior_log_probs.push_back(unroll.behavior_log_probs[t]);
      data.advantages.push_back(returns[t] - values[t]);
      return_targets.push_back(returns[t]);
      data.task_ids.push_back(unroll.task_id);
      ++row;
    }
  }

  // Normalization statistics move first, with the value head compensated so
  // denormalized predictions are preserved; the squared loss then regresses
  // normalized outputs onto targets normalized with the new statistics.
  const PopArtStats new_stats = popart_update(popart_, return_targets, data.task_ids);
  net_.popart_compensate(popart_, new_stats);
  popart_ = new_stats;
  data.normalized_targets.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    data.normalized_targets[i] = popart_normalize(popart_, return_targets[i], data.task_ids[i]);
  }

  Graph g;
  ParameterStore& store = net_.params();
  std::vector<NodeRef> leaves;
  leaves.reserve(store.entry_count());
  for (std::size_t i = 0; i < store.entry_count(); ++i) {
    leaves.push_back(g.leaf(store.tensor(i)));
  }
  VmpoLossLeaves mult_leaves;
  mult_leaves.eta = leaves[store.index_of(kEtaEntry)];
  if (lagrange_.decoupled) {
    mult_leaves.alpha_mu = leaves[store.index_of(kAlphaMuEntry)];
    mult_leaves.alpha_sigma = leaves[store.index_of(kAlphaSigmaEntry)];
  } else {
    mult_leaves.alpha = leaves[store.index_of(kAlphaEntry)];
  }

  VmpoLoss loss = build_vmpo_loss(g, net_, leaves, mult_leaves, data, lagrange_);
  if (!std::isfinite(loss.diag.total)) {
    throw std::runtime_error(
        "train: non-finite loss at learn step " + std::to_string(learn_step_) +
        " (value " + std::to_string(loss.diag.loss_value) + ", policy " +
        std::to_string(loss.diag.loss_policy) + ", eta " + std::to_string(loss.diag.loss_eta) +
        ", alpha " + std::to_string(loss.diag.loss_alpha) + ")");
  }
  g.backward(loss.total);

  std::vector<double> grads(store.flat_size(), 0.0);
  for (std::size_t i = 0; i < store.entry_count(); ++i) {
    const auto& entry = store.entry(i);
    const NodeRef leaf = leaves[i];
    if (!leaf->grad_ready) continue;
    for (std::size_t j = 0; j < entry.size; ++j) grads[entry.offset + j] = leaf->grad[j];
  }
  adam_step(store.flat(), grads, adam_, config_.learning_rate, &store);
  project_multipliers(store);

  env_frames_ += info.batch_samples;
  learn_step_ += 1;

  if (learn_step_ == 1 || learn_step_ % config_.eval_interval == 0) {
    last_eval_ = evaluate(config_.eval_episodes, derive_seed(config_.seed, 5000 + learn_step_),
                          config_.eval_mode_actions);
    has_eval_ = true;
  }

  info.objective = loss.diag;
  info.multipliers = multipliers();
  info.row = make_row(loss.diag);
  rows_.push_back(info.row);
  if (writer_.is_open()) writer_.append(info.row);
  return info;
}

MetricsRow Trainer::make_row(const ObjectiveDiagnostics& diag) const {
  MetricsRow row;
  row.learn_step = learn_step_;
  row.env_frames = env_frames_;
  row.eval_mean_return = last_eval_.mean;
  row.eval_min_return = last_eval_.min;
  row.eval_max_return = last_eval_.max;
  row.loss_value = diag.loss_value;
  row.loss_policy = diag.loss_policy;
  row.loss_eta = diag.loss_eta;
  row.loss_alpha = diag.loss_alpha;
  row.loss_alpha_mu = diag.loss_alpha_mu;
  row.loss_alpha_sigma = diag.loss_alpha_sigma;
  const LagrangeState mult = read_multipliers(net_.params(), lagrange_);
  row.eta = mult.eta;
  if (lagrange_.decoupled) {
    row.alpha_mu = mult.alpha_mu;
    row.alpha_sigma = mult.alpha_sigma;
  } else {
    row.alpha = mult.alpha;
  }
  row.mean_kl = diag.mean_kl;
  row.mean_abs_advantage = diag.mean_abs_advantage;
  row.popart_mean = popart_.mean[0];
  row.popart_scale = popart_.scale[0];
  return row;
}

void Trainer::run() {
  std::filesystem::create_directories(config_.out_dir);
  writer_.open(config_.out_dir + "/metrics.csv");
  for (const MetricsRow& row : rows_) writer_.append(row);
  while (learn_step_ < config_.learn_steps) step();
  save_checkpoint(make_checkpoint(), config_.out_dir + "/checkpoint.bin");
}

EvalStats Trainer::evaluate(int episodes, std::uint64_t seed, bool mode_actions) const {
  const std::unique_ptr<EnvModel> env = roster_[0]();
  return evaluate_policy(net_, net_.params().flat(), *env, episodes, seed, mode_actions);
}

Checkpoint Trainer::make_checkpoint() const {
  Checkpoint c;
  c.env_name = config_.env_name;
  c.env_params = config_.env_params;
  c.net_spec = net_.spec();
  c.layout = net_.params().entries();
  c.flat = net_.params().flat();
  c.has_snapshot = has_snapshot_;
  if (has_snapshot_) {
    c.snapshot_version = snapshot_.version;
    c.snapshot_flat = snapshot_.flat;
  }
  c.next_snapshot_version = net_.next_snapshot_version();
  c.lagrange = read_multipliers(net_.params(), lagrange_);
  c.popart = popart_;
  c.adam = adam_;
  c.learn_step = learn_step_;
  c.env_frames = env_frames_;
  for (const ActorState& a : actors_) {
    ActorResume r;
    r.engine_words = save_engine(a.rng);
    r.env_state = a.env->save_state();
    r.pending_obs = a.pending_obs;
    r.need_reset = a.need_reset;
    c.actors.push_back(std::move(r));
  }
  c.has_eval = has_eval_;
  c.last_eval = last_eval_;
  return c;
}

void Trainer::restore(const Checkpoint& c) {
  const NetSpec& spec = net_.spec();
  if (c.env_name != config_.env_name || c.env_params != config_.env_params) {
    throw std::runtime_error("restore: checkpoint env does not match the configuration");
  }
  if (c.net_spec.obs_dim != spec.obs_dim ||
      c.net_spec.action_space.kind != spec.action_space.kind ||
      c.net_spec.action_space.size != spec.action_space.size ||
      c.net_spec.num_tasks != spec.num_tasks || c.net_spec.trunk_width != spec.trunk_width ||
      c.net_spec.head_width != spec.head_width) {
    throw std::runtime_error("restore: checkpoint net layout does not match");
  }
  if (c.layout.size() != net_.params().entry_count()) {
    throw std::runtime_error("restore: checkpoint parameter layout does not match");
  }
  for (std::size_t i = 0; i < c.layout.size(); ++i) {
    const auto& mine = net_.params().entry(i);
    if (c.layout[i].name != mine.name || c.layout[i].shape != mine.shape) {
      throw std::runtime_error("restore: parameter entry mismatch at " + c.layout[i].name);
    }
  }
  if (c.actors.size() != actors_.size()) {
    throw std::runtime_error("restore: actor count mismatch");
  }
  net_.params().unflatten(c.flat);
  net_.set_next_snapshot_version(c.next_snapshot_version);
  has_snapshot_ = c.has_snapshot;
  if (c.has_snapshot) {
    snapshot_.flat = c.snapshot_flat;
    snapshot_.version = c.snapshot_version;
  }
  popart_ = c.popart;
  adam_ = c.adam;
  learn_step_ = c.learn_step;
  env_frames_ = c.env_frames;
  for (std::size_t i = 0; i < actors_.size(); ++i) {
    load_engine(actors_[i].rng, c.actors[i].engine_words);
    actors_[i].env->load_state(c.actors[i].env_state);
    actors_[i].pending_obs = c.actors[i].pending_obs;
    actors_[i].need_reset = c.actors[i].need_reset;
  }
  has_eval_ = c.has_eval;
  last_eval_ = c.last_eval;
}

EvalStats evaluate_checkpoint(const std::string& path, int episodes, std::uint64_t seed,
                              bool mode_actions) {
  const Checkpoint c = load_checkpoint(path);
  AgentNet net(c.net_spec, /*init_seed=*/0);
  register_multipliers(net.params(), c.lagrange);
  if (net.params().flat_size() != c.flat.size()) {
    throw std::runtime_error("evaluate: checkpoint parameters do not fit the stored net spec");
  }
  net.params().unflatten(c.flat);
  const std::unique_ptr<EnvModel> env = make_env(c.env_name, c.env_params, 0);
  if (env->observation_dim() != c.net_spec.obs_dim ||
      env->action_space().kind != c.net_spec.action_space.kind ||
      env->action_space().size != c.net_spec.action_space.size) {
    throw std::runtime_error("evaluate: env does not match checkpoint metadata");
  }
  return evaluate_policy(net, net.params().flat(), *env, episodes, seed, mode_actions);
}

}  // namespace vmpo
