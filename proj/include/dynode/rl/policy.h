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

// Tanh-squashed diagonal Gaussian policy.
//
// The network maps an observation to 2m outputs: m means followed by m
// log-stds (clamped to [kLogStdMin, kLogStdMax]). A sample is
// a = tanh(mean + exp(log_std) * eps) with eps ~ N(0, I), and its log-density
// includes the change of variables: log N(u) - sum log(1 - tanh(u)^2).

#ifndef DYNODE_RL_POLICY_H_
#define DYNODE_RL_POLICY_H_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "dynode/autodiff/mlp.h"
#include "dynode/autodiff/tape.h"
#include "dynode/autodiff/tensor.h"

namespace dynode::rl {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// Fresh policy network: obs_dim -> hidden (ReLU) -> 2 * action_dim.
ad::MlpParams InitPolicy(std::size_t obs_dim, std::size_t action_dim,
                         std::span<const std::size_t> hidden,
                         std::mt19937_64& rng);

// Reparameterized sample on the tape: action [B x m], log_prob [B x 1].
struct PolicySample {
  ad::Var action;
  ad::Var log_prob;
};
PolicySample SamplePolicy(const ad::BoundMlp& policy, ad::Var obs,
                          const ad::Tensor& noise);

// Frozen-parameter counterpart.
struct ActionBatch {
  ad::Tensor action;    // [B x m]
  ad::Tensor log_prob;  // [B x 1]
};
ActionBatch SampleActions(const ad::MlpParams& policy, const ad::Tensor& obs,
                          const ad::Tensor& noise);
ActionBatch SampleActions(const ad::MlpParams& policy, const ad::Tensor& obs,
                          std::mt19937_64& rng);
// tanh(mean): the policy's mode, used for evaluation.
ad::Tensor MeanActions(const ad::MlpParams& policy, const ad::Tensor& obs);

// Standard normal noise of the given shape.
ad::Tensor GaussianNoise(std::size_t rows, std::size_t cols,
                         std::mt19937_64& rng);

// Density of a = tanh(u), u ~ N(mean, exp(log_std)^2), for a in (-1, 1).
double SquashedGaussianLogDensity(double action, double mean, double log_std);

}  // namespace dynode::rl

#endif  // DYNODE_RL_POLICY_H_
