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

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vmpo/config.hpp"
#include "vmpo/plot.hpp"
#include "vmpo/trainer.hpp"

namespace {

std::vector<std::string> split_fields(const std::string& csv) {
  std::vector<std::string> fields;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) fields.push_back(item);
  }
  return fields;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V-MPO training engine"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a policy from a config file");
  std::string config_path;
  std::int64_t seed_override = -1;
  std::string out_override;
  train_cmd->add_option("--config", config_path, "Path to key=value config file")->required();
  train_cmd->add_option("--seed", seed_override, "Override the config seed");
  train_cmd->add_option("--out", out_override, "Override the config output directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string checkpoint_path;
  int episodes = 100;
  std::uint64_t eval_seed = 0;
  bool mode_actions = false;
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval_cmd->add_option("--episodes", episodes, "Number of evaluation episodes")->required();
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
  eval_cmd->add_flag("--mode-actions", mode_actions, "Act with the distribution mode/mean");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "Render metric charts as SVG");
  std::string metrics_path;
  std::string fields_csv;
  std::string plot_out = ".";
  plot_cmd->add_option("--metrics", metrics_path, "Metrics CSV file")->required();
  plot_cmd->add_option("--fields", fields_csv, "Comma-separated field names")->required();
  plot_cmd->add_option("--out", plot_out, "Output directory");

  // config-reference
  auto* ref_cmd = app.add_subcommand("config-reference", "Print all config keys with defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      vmpo::TrainConfig config = vmpo::parse_config_file(config_path);
      if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
      if (!out_override.empty()) config.out_dir = out_override;
      vmpo::Trainer trainer(config);
      trainer.run();
      const auto& rows = trainer.rows();
      std::printf("trained %llu steps (%llu env frames); metrics: %s/metrics.csv, "
                  "checkpoint: %s/checkpoint.bin\n",
                  static_cast<unsigned long long>(trainer.learn_step()),
                  static_cast<unsigned long long>(trainer.env_frames()),
                  config.out_dir.c_str(), config.out_dir.c_str());
      if (!rows.empty()) {
        std::printf("final eval return: mean %.6g min %.6g max %.6g\n",
                    rows.back().eval_mean_return, rows.back().eval_min_return,
                    rows.back().eval_max_return);
      }
    } else if (*eval_cmd) {
      const vmpo::EvalStats stats =
          vmpo::evaluate_checkpoint(checkpoint_path, episodes, eval_seed, mode_actions);
      std::printf("episodes %d: mean %.10g min %.10g max %.10g\n", episodes, stats.mean,
                  stats.min, stats.max);
    } else if (*plot_cmd) {
      const std::vector<std::string> written =
          vmpo::emit_plot(metrics_path, split_fields(fields_csv), plot_out);
      for (const auto& path : written) std::printf("wrote %s\n", path.c_str());
    } else if (*ref_cmd) {
      std::cout << vmpo::config_reference();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
