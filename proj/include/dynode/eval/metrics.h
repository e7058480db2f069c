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

// Open-loop prediction metrics on a fixed evaluation set.
//
// Errors are measured in normalized state units, using a normalizer fitted
// to the evaluation states themselves so that every model evaluated on one
// set is scored on the same scale.

#ifndef DYNODE_EVAL_METRICS_H_
#define DYNODE_EVAL_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dynode/autodiff/tensor.h"
#include "dynode/data/normalizer.h"
#include "dynode/data/replay.h"
#include "dynode/envs/environment.h"
#include "dynode/models/dynamics_model.h"

namespace dynode::eval {

inline constexpr std::size_t kEvalRollouts = 10;
inline constexpr std::size_t kEvalHorizon = 200;

struct EvalSet {
  std::string env;
  std::vector<data::Rollout> rollouts;
  data::Normalizer normalizer;  // fitted over every state in the set

  std::size_t horizon() const;
  // Throws std::invalid_argument unless the set is non-empty, all rollouts
  // share one horizon >= 1 and the normalizer matches the state dimension.
  void Validate() const;
};

// Draws n_rollouts random-action rollouts of `horizon` steps, each from a
// fresh reset. The random stream is derived from `seed` but is distinct from
// the one data::CollectRandom uses for the same seed, so evaluation episodes
// never coincide with training episodes. Rollouts that hit a terminal state
// before `horizon` steps are discarded and redrawn.
EvalSet MakeEvalSet(const envs::Environment& env, std::uint64_t seed,
                    std::size_t n_rollouts = kEvalRollouts,
                    std::size_t horizon = kEvalHorizon);

// Maps start states [B x n] and H action batches [B x m] to H open-loop
// predicted raw state batches [B x n].
using Predictor = std::function<std::vector<ad::Tensor>(
    const ad::Tensor& start, std::span<const ad::Tensor> actions)>;

// Frozen-parameter open-loop unroll of a learned model.
Predictor ModelPredictor(const models::DynamicsModel& model);
// Steps the true environment (a perfect model).
Predictor EnvironmentPredictor(const envs::Environment& env);
// Predicts that the state never changes.
Predictor FrozenPredictor();

// e_h for h = 1..H: mean absolute normalized error at open-loop step h,
// averaged over rollouts and state dimensions. Throws NumericError
// ("model unroll failure: ...") if the predictor diverges.
std::vector<double> StepErrors(const Predictor& predictor, const EvalSet& set);

// Mean prediction error: the average of e_h over the horizon.
double Mpe(const Predictor& predictor, const EvalSet& set);
double Mpe(const models::DynamicsModel& model, const EvalSet& set);

// Cumulative curve c(h) = e_1 + ... + e_h for each requested horizon
// (c(0) = 0). Throws std::invalid_argument if a horizon exceeds the set's.
std::vector<double> CumulativeError(const Predictor& predictor,
                                    const EvalSet& set,
                                    std::span<const std::size_t> horizons);
// Full curve c(0..H) from step errors; c(H) / H equals Mpe exactly.
std::vector<double> CumulativeCurve(std::span<const double> step_errors);
double MeanOf(std::span<const double> step_errors);

}  // namespace dynode::eval

#endif  // DYNODE_EVAL_METRICS_H_
