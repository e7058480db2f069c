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

// Model-based value expansion (TD(k)) critic targets.
//
// From each real transition (x0, a0, r0, x1) the frozen model imagines
// x2..x{H+1} under policy actions a1..aH. With continuation masks c (zero
// after a terminal state) the soft targets are built backwards:
//   y_{H+1} = min Q'(x_{H+1}, a_{H+1})
//   y_j     = r_j + gamma c_{j+1} (y_{j+1} - alpha log pi(a_{j+1} | x_{j+1}))
// so y_0 is the real reward plus H imagined soft rewards plus a bootstrapped
// soft value, and every live (x_j, a_j), j = 0..H, gets its own target. Each
// sample's pairs share equal weight, so the critic loss averages over the
// horizon and then over the batch. Samples whose imagined rollout diverges
// fall back to the one-step target alone.

#ifndef DYNODE_RL_MVE_H_
#define DYNODE_RL_MVE_H_

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dynode/autodiff/tensor.h"
#include "dynode/data/replay.h"
#include "dynode/rl/policy.h"

namespace dynode::rl {

struct MveContext {
  // Imagined next raw states [B x n] for states [B x n], actions [B x m].
  // May throw NumericError.
  std::function<ad::Tensor(const ad::Tensor&, const ad::Tensor&)> model;
  // Accepts an imagined state row; null accepts every finite row.
  std::function<bool(std::span<const double>)> valid;
  std::function<double(std::span<const double> state,
                       std::span<const double> action,
                       std::span<const double> next_state)>
      reward;
  // Null means no state is terminal.
  std::function<bool(std::span<const double>)> terminal;
  // Raw states [B x n] -> policy/critic inputs [B x obs_dim].
  std::function<ad::Tensor(const ad::Tensor&)> observe;
  std::function<ActionBatch(const ad::Tensor& obs, std::mt19937_64& rng)>
      policy;
  // Delayed-critic minimum [B x 1].
  std::function<ad::Tensor(const ad::Tensor& obs, const ad::Tensor& actions)>
      target_q;
  double gamma = 0.99;
  double alpha = 0.2;
};

// Per-step training pairs, k = 0..H; rows are samples.
struct ExpandedTargets {
  std::vector<ad::Tensor> obs;      // [B x obs_dim]
  std::vector<ad::Tensor> actions;  // [B x m]
  std::vector<ad::Tensor> targets;  // [B x 1]
  std::vector<ad::Tensor> weights;  // [B x 1]; zero for unused pairs
  std::size_t fallbacks = 0;        // live samples reduced to one step

  // All steps stacked k-major into single [(H+1)B x .] tensors.
  ad::Tensor StackedObs() const;
  ad::Tensor StackedActions() const;
  ad::Tensor StackedTargets() const;
  ad::Tensor StackedWeights() const;
};

// Throws std::invalid_argument if the context is incomplete.
ExpandedTargets MveTargets(const MveContext& context,
                           const data::PairBatch& batch, std::size_t horizon,
                           std::mt19937_64& rng);

}  // namespace dynode::rl

#endif  // DYNODE_RL_MVE_H_
