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

#include "dynode/eval/metrics.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dynode/common/errors.h"

namespace dynode::eval {

using ad::Tensor;

std::size_t EvalSet::horizon() const {
  return rollouts.empty() ? 0 : rollouts.front().horizon();
}

void EvalSet::Validate() const {
  if (rollouts.empty()) throw std::invalid_argument("evaluation set is empty");
  const std::size_t h = horizon();
  const std::size_t n = rollouts.front().start.size();
  if (h == 0) throw std::invalid_argument("evaluation horizon must be >= 1");
  for (const auto& r : rollouts) {
    if (r.horizon() != h || r.states.size() != h || r.start.size() != n) {
      throw std::invalid_argument("evaluation rollouts have mixed shapes");
    }
  }
  if (normalizer.dim() != n) {
    throw std::invalid_argument("evaluation normalizer has dimension " +
                                std::to_string(normalizer.dim()) +
                                ", states have " + std::to_string(n));
  }
}

EvalSet MakeEvalSet(const envs::Environment& env, std::uint64_t seed,
                    std::size_t n_rollouts, std::size_t horizon) {
  if (n_rollouts == 0 || horizon == 0) {
    throw std::invalid_argument("evaluation set needs rollouts and horizon >= 1");
  }
  // A tagged seed sequence keeps this stream apart from mt19937_64(seed).
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x65u, 0x76u,
                    0x61u, 0x6cu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const std::size_t m = env.spec().action_dim;
  constexpr std::size_t kMaxAttemptsPerRollout = 1000;

  EvalSet set;
  set.env = env.spec().name;
  std::vector<data::Vec> all_states;
  std::size_t attempts = 0;
  while (set.rollouts.size() < n_rollouts) {
    if (++attempts > kMaxAttemptsPerRollout * n_rollouts) {
      throw std::runtime_error("could not draw " + std::to_string(n_rollouts) +
                               " non-terminating evaluation rollouts of " +
                               std::to_string(horizon) + " steps");
    }
    data::Rollout rollout;
    rollout.start = env.Reset(rng);
    data::Vec state = rollout.start;
    bool terminated = false;
    for (std::size_t h = 0; h < horizon && !terminated; ++h) {
      data::Vec action(m);
      for (double& a : action) a = uniform(rng);
      envs::StepResult step = env.Step(state, action);
      terminated = step.done;
      state = step.next_state;
      rollout.actions.push_back(std::move(action));
      rollout.states.push_back(state);
    }
    if (terminated) continue;
    all_states.push_back(rollout.start);
    all_states.insert(all_states.end(), rollout.states.begin(),
                      rollout.states.end());
    set.rollouts.push_back(std::move(rollout));
  }
  set.normalizer = data::Normalizer::Fit(all_states);
  return set;
}

Predictor ModelPredictor(const models::DynamicsModel& model) {
  return [&model](const Tensor& start, std::span<const Tensor> actions) {
    return model.Unroll(start, actions);
  };
}

Predictor EnvironmentPredictor(const envs::Environment& env) {
  return [&env](const Tensor& start, std::span<const Tensor> actions) {
    std::vector<Tensor> out;
    out.reserve(actions.size());
    Tensor current = start;
    for (const Tensor& a : actions) {
      Tensor next = Tensor::Zeros(current.rows(), current.cols());
      for (std::size_t b = 0; b < current.rows(); ++b) {
        next.SetRow(b, env.Step(current.Row(b), a.Row(b)).next_state);
      }
      out.push_back(next);
      current = std::move(next);
    }
    return out;
  };
}

Predictor FrozenPredictor() {
  return [](const Tensor& start, std::span<const Tensor> actions) {
    return std::vector<Tensor>(actions.size(), start);
  };
}

std::vector<double> StepErrors(const Predictor& predictor, const EvalSet& set) {
  set.Validate();
  const data::SequenceBatch batch = data::ToSequenceBatch(set.rollouts);
  std::vector<Tensor> predicted;
  try {
    predicted = predictor(batch.start, batch.actions);
  } catch (const NumericError& e) {
    throw NumericError(std::string("model unroll failure: ") + e.what());
  }
  if (predicted.size() != batch.horizon()) {
    throw DimensionError("predictor returned " +
                         std::to_string(predicted.size()) + " steps for H=" +
                         std::to_string(batch.horizon()));
  }
  std::vector<double> errors;
  errors.reserve(batch.horizon());
  for (std::size_t h = 0; h < batch.horizon(); ++h) {
    if (!predicted[h].SameShape(batch.states[h])) {
      throw DimensionError("predictor returned " +
                           predicted[h].ShapeString() + " at step " +
                           std::to_string(h) + ", expected " +
                           batch.states[h].ShapeString());
    }
    if (!predicted[h].AllFinite()) {
      throw NumericError("model unroll failure: non-finite prediction at step " +
                         std::to_string(h));
    }
    const Tensor zp = set.normalizer.Normalize(predicted[h]);
    const Tensor zt = set.normalizer.Normalize(batch.states[h]);
    double sum = 0.0;
    for (std::size_t i = 0; i < zp.size(); ++i) sum += std::abs(zp[i] - zt[i]);
    errors.push_back(sum / static_cast<double>(zp.size()));
  }
  return errors;
}

std::vector<double> CumulativeCurve(std::span<const double> step_errors) {
  std::vector<double> curve(step_errors.size() + 1, 0.0);
  for (std::size_t h = 0; h < step_errors.size(); ++h) {
    curve[h + 1] = curve[h] + step_errors[h];
  }
  return curve;
}

double MeanOf(std::span<const double> step_errors) {
  if (step_errors.empty()) throw std::invalid_argument("no step errors");
  return CumulativeCurve(step_errors).back() /
         static_cast<double>(step_errors.size());
}

double Mpe(const Predictor& predictor, const EvalSet& set) {
  return MeanOf(StepErrors(predictor, set));
}

double Mpe(const models::DynamicsModel& model, const EvalSet& set) {
  return Mpe(ModelPredictor(model), set);
}

std::vector<double> CumulativeError(const Predictor& predictor,
                                    const EvalSet& set,
                                    std::span<const std::size_t> horizons) {
  set.Validate();
  for (std::size_t h : horizons) {
    if (h > set.horizon()) {
      throw std::invalid_argument("cumulative horizon " + std::to_string(h) +
                                  " exceeds evaluation horizon " +
                                  std::to_string(set.horizon()));
    }
  }
  const std::vector<double> curve =
      CumulativeCurve(StepErrors(predictor, set));
  std::vector<double> out;
  out.reserve(horizons.size());
  for (std::size_t h : horizons) out.push_back(curve[h]);
  return out;
}

}  // namespace dynode::eval
