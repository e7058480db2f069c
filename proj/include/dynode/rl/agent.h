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

// The agent loop: environment interaction, periodic dynamics-model training
// on the growing replay and SAC updates with optional value expansion.
//
// Every run is a pure function of (environment, variant, config). Random
// streams for environment resets, agent sampling, model training and the
// reference episode are independent, so a variant that never consults its
// model behaves bit-identically to plain SAC. The full run state can be
// saved and restored; a restored run continues exactly as the original.

#ifndef DYNODE_RL_AGENT_H_
#define DYNODE_RL_AGENT_H_

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynode/autodiff/adam.h"
#include "dynode/autodiff/mlp.h"
#include "dynode/data/replay.h"
#include "dynode/envs/environment.h"
#include "dynode/models/dynamics_model.h"
#include "dynode/rl/mve.h"
#include "dynode/rl/sac.h"

namespace dynode::rl {

// One completed episode. Losses are means over the updates made during the
// episode (NaN when there were none); the fallback count is cumulative.
// Row 0 (episode 0, env_step 0) is a reference episode of the uniform random
// policy that consumes no budget.
struct CurveRow {
  std::size_t env_step = 0;
  std::size_t episode = 0;
  double episode_return = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double model_loss = 0.0;
  std::size_t mve_fallbacks = 0;

  bool operator==(const CurveRow& other) const;
};
using LearningCurve = std::vector<CurveRow>;

std::string LearningCurveCsv(const LearningCurve& curve);
// Throws IoError on malformed input.
LearningCurve ParseLearningCurveCsv(const std::string& text);

// Mean return of the last `last` training episodes (reference row
// excluded). NaN if there are none.
double FinalReturn(const LearningCurve& curve, std::size_t last = 10);

// Seed-averaged return against environment steps, one line per variant.
std::string Fig3Svg(const std::string& env,
                    const std::map<std::string, std::vector<LearningCurve>>&
                        curves_by_variant);

// Policy/critic inputs for a batch of raw states.
ad::Tensor ObserveRows(const envs::Environment& env, const ad::Tensor& states);

class Agent {
 public:
  // Throws std::invalid_argument for an invalid config.
  Agent(const envs::Environment& env, Variant variant, SacConfig config);

  // Advances by up to max_steps environment steps, stopping at the budget.
  void Run(std::size_t max_steps = std::numeric_limits<std::size_t>::max());
  bool finished() const { return step_ >= config_.steps; }

  std::size_t env_step() const { return step_; }
  Variant variant() const { return variant_; }
  const SacConfig& config() const { return config_; }
  const LearningCurve& curve() const { return curve_; }
  const ad::MlpParams& policy() const { return policy_; }
  const TwinCritic& critics() const { return critics_; }
  const std::optional<models::DynamicsModel>& model() const { return model_; }
  std::size_t model_trainings() const { return model_trainings_; }

  // Complete run state (config, networks, optimizer moments, replay, random
  // streams, episode progress). Throws IoError.
  void Save(const std::filesystem::path& file) const;
  // Throws IoError on a malformed file or an environment mismatch.
  static Agent Load(const envs::Environment& env,
                    const std::filesystem::path& file);

 private:
  Agent(const envs::Environment& env, Variant variant, SacConfig config,
        bool fresh);

  void EnvironmentStep();
  void EndEpisode();
  void TrainModel();
  void Update();
  MveContext ExpansionContext() const;

  const envs::Environment* env_;
  Variant variant_;
  SacConfig config_;

  ad::MlpParams policy_;
  TwinCritic critics_;
  ad::AdamState policy_adam_, q1_adam_, q2_adam_;
  std::optional<models::DynamicsModel> model_;
  ad::AdamState model_adam_;
  bool model_ready_ = false;
  std::size_t model_trainings_ = 0;
  double model_loss_ = std::numeric_limits<double>::quiet_NaN();

  data::ReplayBuffer replay_;
  std::mt19937_64 env_rng_, agent_rng_, model_rng_;

  envs::State state_;
  std::size_t step_ = 0;
  std::size_t episode_ = 0;
  std::size_t episode_steps_ = 0;
  double episode_return_ = 0.0;
  double critic_loss_sum_ = 0.0, actor_loss_sum_ = 0.0;
  std::size_t updates_in_episode_ = 0;
  std::size_t fallbacks_ = 0;
  LearningCurve curve_;
};

// Runs a fresh agent to its budget. If a checkpoint path is given and the
// run fails, the run state is saved there before the error propagates.
LearningCurve RunAgent(const envs::Environment& env, Variant variant,
                       const SacConfig& config,
                       const std::filesystem::path& failure_checkpoint = {});

}  // namespace dynode::rl

#endif  // DYNODE_RL_AGENT_H_
