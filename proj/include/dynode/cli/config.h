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

// Experiment configuration: a sectioned key-value file whose every key has
// a default. Unknown sections or keys are rejected so typos fail loudly.
//
//   [experiment]
//   envs = mountaincar, pendulum
//   seeds = 0, 1, 2
//   [train]
//   iterations = 2000

#ifndef DYNODE_CLI_CONFIG_H_
#define DYNODE_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dynode/models/dynamics_model.h"
#include "dynode/models/train.h"
#include "dynode/rl/sac.h"

namespace dynode::cli {

struct ExperimentConfig {
  // [experiment]
  std::vector<std::string> envs = {"mountaincar"};
  std::vector<std::string> models = {"nn", "dynode-euler", "dynode-rk4"};
  std::vector<std::size_t> samples = {200, 500, 1000};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t episode_length = 200;
  std::string out = "out";
  std::size_t threads = 0;  // 0: DYNODE_THREADS or the hardware count

  // [model]
  std::vector<std::size_t> hidden = {64, 64};
  std::string activation = "tanh";
  int substeps = 1;  // solver steps per environment step

  // [train]
  std::size_t horizon_euler = 20;
  std::size_t horizon_rk4 = 7;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::size_t iterations = 2000;
  double noise_sigma = 0.01;
  std::size_t eval_every = 100;
  std::size_t probe_batch = 256;

  // [eval]
  std::size_t eval_rollouts = 10;
  std::size_t eval_horizon = 200;
  std::uint64_t eval_seed = 1000;

  // [fig5]
  std::size_t fig5_samples = 1000;
  std::size_t fig5_max_steps = 500;
  std::vector<std::string> fig5_models = {"nn", "dynode-euler", "dynode-rk4"};

  // [rl]
  std::vector<std::string> rl_envs = {"pendulum", "cartpole-swingup"};
  std::vector<std::string> rl_variants = {"sac", "mve-sac", "dynode-sac"};
  rl::SacConfig sac;  // sac.seed is replaced per run
  std::size_t checkpoint_every = 0;  // 0: only the final checkpoint

  // Throws ConfigError naming the offending key.
  void Validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses INI text over the defaults. Throws ConfigError on syntax errors,
// unknown sections or keys, and malformed or invalid values.
ExperimentConfig ParseConfig(const std::string& text);
// Reads and parses a file; a missing file is a ConfigError.
ExperimentConfig LoadConfig(const std::string& path);
// Every key with its resolved value; ParseConfig(ResolvedConfigText(c)) == c.
std::string ResolvedConfigText(const ExperimentConfig& config);
// Applies one "section.key=value" override. Throws ConfigError.
void ApplyOverride(ExperimentConfig& config, const std::string& assignment);

// Open-loop training horizon for a model kind (1 for the baseline).
std::size_t HorizonFor(const ExperimentConfig& config, models::ModelKind kind);
models::ModelConfig ModelConfigFor(const ExperimentConfig& config,
                                   models::ModelKind kind, double dt);
models::TrainConfig TrainConfigFor(const ExperimentConfig& config,
                                   models::ModelKind kind, std::uint64_t seed);
rl::SacConfig SacConfigFor(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace dynode::cli

#endif  // DYNODE_CLI_CONFIG_H_
