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

// Model training: multi-step path loss for DyNODE, one-step L1 for the
// baseline. Both minimize absolute error in normalized state space with Adam.

#ifndef DYNODE_MODELS_TRAIN_H_
#define DYNODE_MODELS_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dynode/autodiff/adam.h"
#include "dynode/data/replay.h"
#include "dynode/models/dynamics_model.h"

namespace dynode::models {

struct TrainConfig {
  std::size_t horizon = 20;        // rollout length H (DyNODE only)
  std::size_t batch = 32;          // rollouts for DyNODE, pairs for baseline
  double lr = 1e-3;
  std::size_t max_iterations = 20000;
  double noise_sigma = 0.01;       // on model-input states only
  std::size_t eval_every = 100;    // probe-loss cadence
  std::size_t probe_batch = 256;   // fixed noise-free probe set size
  std::uint64_t seed = 0;

  // Throws std::invalid_argument unless horizon >= 1, batch >= 1, lr > 0
  // and noise_sigma >= 0.
  void Validate() const;
};

struct ProbePoint {
  std::size_t iteration = 0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<double> batch_losses;  // one per iteration, before the update
  std::vector<ProbePoint> probe;     // fixed-probe loss at the cadence
};

// Trains a DyNODE model in place on windows of cfg.horizon steps. Each
// iteration: sample a batch of rollouts, perturb the start states, unroll
// open loop, take the path loss, backpropagate and apply Adam. The model's
// normalizer is used as-is. Throws NumericError naming the iteration on
// NaN/Inf.
TrainResult TrainDynode(DynamicsModel& model, const data::ReplayBuffer& buffer,
                        const TrainConfig& cfg, ad::AdamState* adam = nullptr);

// Baseline counterpart on independent (s, a, s') pairs; cfg.horizon is
// ignored.
TrainResult TrainBaseline(DynamicsModel& model,
                          const data::ReplayBuffer& buffer,
                          const TrainConfig& cfg,
                          ad::AdamState* adam = nullptr);

// Dispatches on model.kind().
TrainResult TrainModel(DynamicsModel& model, const data::ReplayBuffer& buffer,
                       const TrainConfig& cfg, ad::AdamState* adam = nullptr);

}  // namespace dynode::models

#endif  // DYNODE_MODELS_TRAIN_H_
