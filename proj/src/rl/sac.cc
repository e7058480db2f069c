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

#include "dynode/rl/sac.h"

#include <stdexcept>

#include "dynode/common/errors.h"
#include "dynode/rl/policy.h"

namespace dynode::rl {

using ad::Tensor;
using ad::Var;

std::string VariantName(Variant variant) {
  switch (variant) {
    case Variant::kSac: return "sac";
    case Variant::kMveSac: return "mve-sac";
    case Variant::kDynodeSac: return "dynode-sac";
  }
  return "";
}

Variant ParseVariant(const std::string& name) {
  if (name == "sac") return Variant::kSac;
  if (name == "mve-sac") return Variant::kMveSac;
  if (name == "dynode-sac") return Variant::kDynodeSac;
  throw std::invalid_argument("unknown agent variant '" + name +
                              "' (expected sac, mve-sac or dynode-sac)");
}

void SacConfig::Validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1)");
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in (0, 1]");
  }
  if (!(lr > 0.0) || !(model_lr > 0.0)) {
    throw std::invalid_argument("learning rates must be > 0");
  }
  if (batch == 0 || model_batch == 0 || updates_per_step == 0) {
    throw std::invalid_argument("batch sizes and updates per step must be >= 1");
  }
  if (hidden.empty() || model_hidden.empty()) {
    throw std::invalid_argument("networks need at least one hidden layer");
  }
  if (retrain_every == 0 || model_horizon == 0) {
    throw std::invalid_argument("retrain cadence and model horizon must be >= 1");
  }
  if (!(divergence_bound > 0.0) || !(model_noise_sigma >= 0.0)) {
    throw std::invalid_argument("divergence bound must be > 0, noise >= 0");
  }
}

std::size_t SacConfig::ExpansionHorizon(Variant variant) const {
  return variant == Variant::kSac ? 0 : mve_horizon;
}

TwinCritic InitTwinCritic(std::size_t obs_dim, std::size_t action_dim,
                          std::span<const std::size_t> hidden,
                          std::mt19937_64& rng) {
  std::vector<std::size_t> sizes = {obs_dim + action_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  TwinCritic c;
  c.q1 = ad::InitMlp(sizes, ad::Activation::kRelu,
                     ad::OutputActivation::kIdentity, rng);
  c.q2 = ad::InitMlp(sizes, ad::Activation::kRelu,
                     ad::OutputActivation::kIdentity, rng);
  c.target1 = c.q1;
  c.target2 = c.q2;
  return c;
}

void PolyakUpdate(const ad::MlpParams& online, ad::MlpParams& target,
                  double tau) {
  auto src = online.Tensors();
  auto dst = target.Tensors();
  if (src.size() != dst.size()) {
    throw DimensionError("polyak: networks have different layer counts");
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!src[i]->SameShape(*dst[i])) {
      throw DimensionError("polyak: shape mismatch in tensor " +
                           std::to_string(i));
    }
    auto d = dst[i]->data();
    auto s = src[i]->data();
    for (std::size_t k = 0; k < d.size(); ++k) {
      d[k] = tau * s[k] + (1.0 - tau) * d[k];
    }
  }
}

Var CriticValue(const ad::BoundMlp& q, Var obs, Var action) {
  return q.Forward(ad::ConcatCols(obs, action));
}

Var SoftValue(const ad::BoundMlp& policy, const ad::BoundMlp& target1,
              const ad::BoundMlp& target2, Var next_obs, const Tensor& noise,
              double alpha) {
  PolicySample next = SamplePolicy(policy, next_obs, noise);
  Var q = ad::Minimum(CriticValue(target1, next_obs, next.action),
                      CriticValue(target2, next_obs, next.action));
  return ad::Sub(q, ad::Scale(next.log_prob, alpha));
}

Var SoftTargets(Var rewards, Var dones, Var next_values, double gamma) {
  Var live = ad::AddScalar(ad::Scale(dones, -1.0), 1.0);
  return ad::Add(rewards, ad::Scale(ad::Mul(live, next_values), gamma));
}

Var CriticLoss(const ad::BoundMlp& q, Var obs, Var actions, Var targets) {
  Var diff = ad::Sub(CriticValue(q, obs, actions), ad::Detach(targets));
  return ad::Scale(ad::Mean(ad::Square(diff)), 0.5);
}

Var WeightedCriticLoss(const ad::BoundMlp& q, Var obs, Var actions,
                       Var targets, const Tensor& weights) {
  Var diff = ad::Sub(CriticValue(q, obs, actions), ad::Detach(targets));
  Var w = obs.tape()->Constant(weights);
  return ad::Scale(ad::Sum(ad::Mul(w, ad::Square(diff))), 0.5);
}

Var ActorLoss(const ad::BoundMlp& policy, Var obs, const Tensor& noise,
              double alpha, const QFunction& q) {
  PolicySample sample = SamplePolicy(policy, obs, noise);
  Var objective =
      ad::Sub(ad::Scale(sample.log_prob, alpha), q(obs, sample.action));
  return ad::Mean(objective);
}

QFunction MinCritic(const ad::BoundMlp& q1, const ad::BoundMlp& q2) {
  return [&q1, &q2](Var obs, Var action) {
    return ad::Minimum(CriticValue(q1, obs, action),
                       CriticValue(q2, obs, action));
  };
}

}  // namespace dynode::rl
