// Copyright 2026 The DyNODE Authors
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

// dynode: command-line entry point for the experiment pipeline.
//
//   dynode collect     --config exp.ini
//   dynode train-model --config exp.ini --seed 3
//   dynode eval        --config exp.ini --out runs/a
//   dynode rl          --config exp.ini --resume
//   dynode repro       table1|fig4|fig5|fig3|all
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numeric failure,
// 4 I/O failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynode/cli/config.h"
#include "dynode/cli/pipeline.h"
#include "dynode/common/errors.h"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;
constexpr int kIoExit = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

void AddCommonFlags(CLI::App* command, CommonFlags& flags) {
  command->add_option("--config", flags.config_path, "INI experiment config");
  command->add_option("--seed", flags.seed, "Run a single seed");
  command->add_option("--out", flags.out, "Output directory");
  command->add_option("--set", flags.overrides,
                      "Override a key: section.key=value (repeatable)");
}

dynode::cli::ExperimentConfig ResolveConfig(const CommonFlags& flags) {
  dynode::cli::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    config = dynode::cli::LoadConfig(flags.config_path);
  }
  for (const std::string& assignment : flags.overrides) {
    dynode::cli::ApplyOverride(config, assignment);
  }
  if (flags.seed) config.seeds = {*flags.seed};
  if (!flags.out.empty()) config.out = flags.out;
  config.Validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DyNODE dynamics-model and model-based RL experiments"};
  app.require_subcommand(1);
  CommonFlags flags;
  bool resume = false;
  std::string target;

  CLI::App* collect =
      app.add_subcommand("collect", "Collect random-action datasets");
  CLI::App* train =
      app.add_subcommand("train-model", "Train dynamics models on datasets");
  CLI::App* evaluate =
      app.add_subcommand("eval", "Score trained models; write table and figures");
  CLI::App* rl = app.add_subcommand("rl", "Run SAC agents and learning curves");
  CLI::App* repro =
      app.add_subcommand("repro", "Desk-scale reproduction of a figure or table");
  for (CLI::App* command : {collect, train, evaluate, rl, repro}) {
    AddCommonFlags(command, flags);
  }
  rl->add_flag("--resume", resume, "Continue runs from their checkpoints");
  repro->add_option("target", target, "all, table1, fig4, fig5 or fig3")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigExit;
  }

  try {
    const dynode::cli::ExperimentConfig config = ResolveConfig(flags);
    dynode::cli::Paths written;
    if (collect->parsed()) {
      written = dynode::cli::CmdCollect(config, std::cerr);
    } else if (train->parsed()) {
      written = dynode::cli::CmdTrainModel(config, std::cerr);
    } else if (evaluate->parsed()) {
      written = dynode::cli::CmdEval(config, std::cerr);
    } else if (rl->parsed()) {
      written = dynode::cli::CmdRl(config, resume, std::cerr);
    } else {
      written = dynode::cli::CmdRepro(config, target, std::cerr);
    }
    for (const std::filesystem::path& path : written) {
      std::cout << path.string() << '\n';
    }
    return 0;
  } catch (const dynode::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const dynode::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericExit;
  } catch (const dynode::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoExit;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  }
}
