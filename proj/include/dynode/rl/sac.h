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

// Soft actor-critic building blocks: configuration, twin critics with
// delayed copies, the soft Bellman critic loss, the reparameterized actor
// loss and Polyak averaging.

#ifndef DYNODE_RL_SAC_H_
#define DYNODE_RL_SAC_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynode/autodiff/adam.h"
#include "dynode/autodiff/mlp.h"
#include "dynode/autodiff/tape.h"
#include "dynode/autodiff/tensor.h"

namespace dynode::rl {

// sac: no model. mve-sac: one-step network model. dynode-sac: DyNODE model.
enum class Variant { kSac, kMveSac, kDynodeSac };

std::string VariantName(Variant variant);
// Throws std::invalid_argument on unknown names.
Variant ParseVariant(const std::string& name);

struct SacConfig {
  // Agent.
  double gamma = 0.99;
  double alpha = 0.2;  // fixed entropy temperature
  double tau = 0.005;  // Polyak step for the delayed critics
  double lr = 3e-4;
  std::size_t batch = 128;
  std::vector<std::size_t> hidden = {128, 128};
  std::size_t steps = 15000;        // environment-step budget
  std::size_t start_steps = 1000;   // uniform random actions before this
  std::size_t update_after = 1000;  // first gradient update
  std::size_t updates_per_step = 1;
  std::size_t replay_capacity = 0;  // 0 = unbounded
  // Value expansion (ignored by the sac variant).
  std::size_t mve_horizon = 3;
  double divergence_bound = 1e3;  // |normalized imagined state| limit
  // Dynamics model (mve-sac and dynode-sac).
  std::size_t retrain_every = 250;
  std::size_t model_iterations = 250;
  std::size_t model_horizon = 5;  // DyNODE path length inside RL
  std::size_t model_batch = 32;
  double model_lr = 1e-3;
  std::vector<std::size_t> model_hidden = {64, 64};
  double model_noise_sigma = 0.01;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument unless 0 < gamma < 1, alpha >= 0,
  // 0 < tau <= 1, lr > 0, batch >= 1 and the model settings are positive.
  void Validate() const;
  // Expansion horizon actually used by a variant (0 for sac).
  std::size_t ExpansionHorizon(Variant variant) const;

  bool operator==(const SacConfig&) const = default;
};

struct TwinCritic {
  ad::MlpParams q1, q2;
  ad::MlpParams target1, target2;  // delayed copies
};

// Critics obs_dim + action_dim -> hidden (ReLU) -> 1; targets start equal.
TwinCritic InitTwinCritic(std::size_t obs_dim, std::size_t action_dim,
                          std::span<const std::size_t> hidden,
                          std::mt19937_64& rng);

// target <- tau * online + (1 - tau) * target, elementwise.
void PolyakUpdate(const ad::MlpParams& online, ad::MlpParams& target,
                  double tau);

// Q(obs, action) on the tape: [B x 1].
ad::Var CriticValue(const ad::BoundMlp& q, ad::Var obs, ad::Var action);

// Soft state value at next states from the delayed critics:
// V(s') = min(Q1'(s', a'), Q2'(s', a')) - alpha log pi(a' | s'),
// a' ~ pi(. | s') drawn with `noise`. Recorded on the targets' tape.
ad::Var SoftValue(const ad::BoundMlp& policy, const ad::BoundMlp& target1,
                  const ad::BoundMlp& target2, ad::Var next_obs,
                  const ad::Tensor& noise, double alpha);

// One-step soft targets y = r + gamma (1 - done) V(s'); rewards and dones
// are [B x 1].
ad::Var SoftTargets(ad::Var rewards, ad::Var dones, ad::Var next_values,
                    double gamma);

// 1/2 mean (Q(s, a) - y)^2 for one critic. The targets are detached, so no
// gradient flows into whatever produced them.
ad::Var CriticLoss(const ad::BoundMlp& q, ad::Var obs, ad::Var actions,
                   ad::Var targets);

// Weighted form used by value expansion: 1/2 sum_i w_i (Q(s_i, a_i) - y_i)^2.
ad::Var WeightedCriticLoss(const ad::BoundMlp& q, ad::Var obs, ad::Var actions,
                           ad::Var targets, const ad::Tensor& weights);

// Q used by the actor: (obs, action) -> [B x 1].
using QFunction = std::function<ad::Var(ad::Var obs, ad::Var action)>;

// mean[alpha log pi(a | s) - Q(s, a)] with a reparameterized from `noise`.
ad::Var ActorLoss(const ad::BoundMlp& policy, ad::Var obs,
                  const ad::Tensor& noise, double alpha, const QFunction& q);

// min(Q1, Q2) with both critics bound as constants on the policy's tape.
QFunction MinCritic(const ad::BoundMlp& q1, const ad::BoundMlp& q2);

}  // namespace dynode::rl

#endif  // DYNODE_RL_SAC_H_
