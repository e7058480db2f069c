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

#include "dynode/models/train.h"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "dynode/common/errors.h"

namespace dynode::models {

using ad::Tensor;
using ad::Var;

void TrainConfig::Validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (!(noise_sigma >= 0.0)) {
    throw std::invalid_argument("noise_sigma must be >= 0");
  }
}

namespace {

// Sequence batch in normalized coordinates.
data::SequenceBatch NormalizeSequences(const DynamicsModel& model,
                                       std::span<const data::Rollout> rollouts) {
  data::SequenceBatch batch = data::ToSequenceBatch(rollouts);
  const data::Normalizer& norm = model.normalizer();
  batch.start = norm.Normalize(batch.start);
  for (Tensor& s : batch.states) s = norm.Normalize(s);
  return batch;
}

// Path loss of the model on a normalized batch; optionally returns grads.
double SequenceLoss(const DynamicsModel& model, const data::SequenceBatch& batch,
                    ad::MlpParams* grads) {
  ad::Tape tape;
  ad::BoundMlp net(model.net(), tape, grads != nullptr);
  std::vector<Var> actions;
  actions.reserve(batch.horizon());
  for (const Tensor& a : batch.actions) actions.push_back(tape.Constant(a));
  const auto predictions =
      model.UnrollNormalized(net, tape.Constant(batch.start), actions);
  Var loss = PathLoss(predictions, batch.states);
  if (grads != nullptr) {
    tape.Backward(loss);
    *grads = net.Gradients();
  }
  return loss.value()[0];
}

using LossFn = std::function<double(std::mt19937_64&, ad::MlpParams*)>;

TrainResult RunLoop(DynamicsModel& model, const TrainConfig& cfg,
                    ad::AdamState* adam, const LossFn& sample_loss,
                    const std::function<double()>& probe_loss) {
  cfg.Validate();
  ad::AdamState local;
  ad::AdamState& state = adam != nullptr ? *adam : local;
  const ad::AdamConfig adam_cfg{cfg.lr};
  std::mt19937_64 rng(cfg.seed);
  TrainResult result;
  result.batch_losses.reserve(cfg.max_iterations);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    try {
      if (cfg.eval_every > 0 && it % cfg.eval_every == 0) {
        result.probe.push_back({it, probe_loss()});
      }
      ad::MlpParams grads;
      result.batch_losses.push_back(sample_loss(rng, &grads));
      ad::AdamStep(model.mutable_net(), grads, state, adam_cfg);
      for (const Tensor* t : std::as_const(model.net()).Tensors()) {
        if (!t->AllFinite()) throw NumericError("adam produced NaN/Inf");
      }
    } catch (const NumericError& e) {
      throw NumericError("training iteration " + std::to_string(it) + ": " +
                         e.what());
    }
  }
  if (cfg.max_iterations > 0 && cfg.eval_every > 0) {
    result.probe.push_back({cfg.max_iterations, probe_loss()});
  }
  return result;
}

}  // namespace

TrainResult TrainDynode(DynamicsModel& model, const data::ReplayBuffer& buffer,
                        const TrainConfig& cfg, ad::AdamState* adam) {
  if (!IsDynode(model.kind())) {
    throw std::invalid_argument("TrainDynode needs a DyNODE model");
  }
  cfg.Validate();
  // The probe set is fixed for the whole run and drawn from its own stream.
  std::mt19937_64 probe_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto probe_rollouts =
      buffer.SampleSequences(cfg.probe_batch, cfg.horizon, probe_rng);
  auto sample_loss = [&](std::mt19937_64& rng, ad::MlpParams* grads) {
    const auto rollouts = buffer.SampleSequences(cfg.batch, cfg.horizon, rng);
    data::SequenceBatch batch = NormalizeSequences(model, rollouts);
    data::AddStateNoise(batch.start, cfg.noise_sigma, rng);
    return SequenceLoss(model, batch, grads);
  };
  auto probe_loss = [&] {
    return SequenceLoss(model, NormalizeSequences(model, probe_rollouts),
                        nullptr);
  };
  return RunLoop(model, cfg, adam, sample_loss, probe_loss);
}

TrainResult TrainBaseline(DynamicsModel& model,
                          const data::ReplayBuffer& buffer,
                          const TrainConfig& cfg, ad::AdamState* adam) {
  if (IsDynode(model.kind())) {
    throw std::invalid_argument("TrainBaseline needs a baseline model");
  }
  TrainConfig one_step = cfg;
  one_step.horizon = 1;
  one_step.Validate();
  std::mt19937_64 probe_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto probe_rollouts =
      buffer.SampleSequences(cfg.probe_batch, 1, probe_rng);
  auto sample_loss = [&](std::mt19937_64& rng, ad::MlpParams* grads) {
    const auto pairs = buffer.SamplePairs(cfg.batch, rng);
    std::vector<data::Rollout> rollouts;
    rollouts.reserve(pairs.size());
    for (const data::Transition& t : pairs) {
      rollouts.push_back({t.state, {t.action}, {t.next_state}});
    }
    data::SequenceBatch batch = NormalizeSequences(model, rollouts);
    data::AddStateNoise(batch.start, cfg.noise_sigma, rng);
    return SequenceLoss(model, batch, grads);
  };
  auto probe_loss = [&] {
    return SequenceLoss(model, NormalizeSequences(model, probe_rollouts),
                        nullptr);
  };
  return RunLoop(model, one_step, adam, sample_loss, probe_loss);
}

TrainResult TrainModel(DynamicsModel& model, const data::ReplayBuffer& buffer,
                       const TrainConfig& cfg, ad::AdamState* adam) {
  return IsDynode(model.kind()) ? TrainDynode(model, buffer, cfg, adam)
                                : TrainBaseline(model, buffer, cfg, adam);
}

}  // namespace dynode::models
