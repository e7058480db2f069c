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

// Learned dynamics models.
//
// Both flavors share one network mapping concat(state, action) to a
// state-sized output, evaluated in normalized state coordinates z:
//   DyNODE:   dz/dt = net(z, a), integrated over one environment step with
//             the configured solver (action held constant);
//   baseline: z' = z + net(z, a), a one-step delta predictor.
// The final layer is zero-initialized, so an untrained model of either
// flavor is the identity map.

#ifndef DYNODE_MODELS_DYNAMICS_MODEL_H_
#define DYNODE_MODELS_DYNAMICS_MODEL_H_

#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynode/autodiff/mlp.h"
#include "dynode/autodiff/tape.h"
#include "dynode/autodiff/tensor.h"
#include "dynode/data/normalizer.h"
#include "dynode/ode/solver.h"

namespace dynode::models {

enum class ModelKind { kBaseline, kDynodeEuler, kDynodeRk4 };

// "nn", "dynode-euler", "dynode-rk4".
std::string ModelKindName(ModelKind kind);
// Throws std::invalid_argument on unknown names.
ModelKind ParseModelKind(const std::string& name);
bool IsDynode(ModelKind kind);

struct ModelConfig {
  ModelKind kind = ModelKind::kDynodeEuler;
  std::vector<std::size_t> hidden = {256, 256};
  ad::Activation activation = ad::Activation::kTanh;
  double dt = 1.0;   // environment step in seconds (DyNODE only)
  int substeps = 1;  // solver steps per environment step (DyNODE only)
};

// Adapts a network to a derivative field: (z, a) -> net(concat(z, a)).
class NetField : public ode::DerivativeField {
 public:
  NetField(const ad::BoundMlp& net, std::size_t state_dim,
           std::size_t action_dim)
      : net_(net), state_dim_(state_dim), action_dim_(action_dim) {}
  std::size_t state_dim() const override { return state_dim_; }
  std::size_t action_dim() const override { return action_dim_; }
  ad::Var Evaluate(ad::Var state, ad::Var action) const override;

 private:
  const ad::BoundMlp& net_;
  std::size_t state_dim_;
  std::size_t action_dim_;
};

// Expresses a raw-coordinate field in normalized coordinates:
// dz/dt = f(z * std + mean, a) / std.
class NormalizedField : public ode::DerivativeField {
 public:
  NormalizedField(const ode::DerivativeField& raw,
                  const data::Normalizer& normalizer)
      : raw_(raw), normalizer_(normalizer) {}
  std::size_t state_dim() const override { return raw_.state_dim(); }
  std::size_t action_dim() const override { return raw_.action_dim(); }
  ad::Var Evaluate(ad::Var state, ad::Var action) const override;

 private:
  const ode::DerivativeField& raw_;
  const data::Normalizer& normalizer_;
};

class DynamicsModel {
 public:
  DynamicsModel() = default;
  // Fresh network with a zero final layer and an identity normalizer.
  DynamicsModel(const ModelConfig& config, std::size_t state_dim,
                std::size_t action_dim, std::mt19937_64& rng);
  DynamicsModel(ModelKind kind, ad::MlpParams net, data::Normalizer normalizer,
                ode::SolverConfig solver);

  ModelKind kind() const { return kind_; }
  std::size_t state_dim() const { return net_.output_dim(); }
  std::size_t action_dim() const { return net_.input_dim() - state_dim(); }
  const ad::MlpParams& net() const { return net_; }
  ad::MlpParams& mutable_net() { return net_; }
  const data::Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(data::Normalizer normalizer);
  const ode::SolverConfig& solver() const { return solver_; }

  // One predicted step in normalized coordinates, recorded on the net's
  // tape. z [B x n], a [B x m].
  ad::Var StepNormalized(const ad::BoundMlp& net, ad::Var z,
                         ad::Var a) const;
  // Same transition rule with the network replaced by an arbitrary field
  // (DyNODE flavors only; used to validate the solver path).
  ad::Var StepWithField(const ode::DerivativeField& field, ad::Var z,
                        ad::Var a) const;
  // Open-loop unroll: H predicted normalized states.
  std::vector<ad::Var> UnrollNormalized(const ad::BoundMlp& net, ad::Var z0,
                                        std::span<const ad::Var> actions) const;

  // Frozen-parameter predictions in raw units on batches [B x dim].
  ad::Tensor PredictNext(const ad::Tensor& states,
                         const ad::Tensor& actions) const;
  std::vector<ad::Tensor> Unroll(const ad::Tensor& start,
                                 std::span<const ad::Tensor> actions) const;
  // Same, returning normalized predictions.
  std::vector<ad::Tensor> UnrollToNormalized(
      const ad::Tensor& start, std::span<const ad::Tensor> actions) const;

  bool operator==(const DynamicsModel&) const = default;

 private:
  ModelKind kind_ = ModelKind::kBaseline;
  ad::MlpParams net_;
  data::Normalizer normalizer_;
  ode::SolverConfig solver_;
};

// Mean over batch, state dimensions and horizon of |prediction - target|.
// All H predictions share one shape; targets are constants.
ad::Var PathLoss(std::span<const ad::Var> predictions,
                 std::span<const ad::Tensor> targets);

// Writes <prefix>.bin (network) and <prefix>.json (kind, solver,
// normalizer, training horizon). Throws IoError.
void SaveModel(const std::filesystem::path& prefix, const DynamicsModel& model,
               std::size_t horizon);
DynamicsModel LoadModel(const std::filesystem::path& prefix,
                        std::size_t* horizon = nullptr);

}  // namespace dynode::models

#endif  // DYNODE_MODELS_DYNAMICS_MODEL_H_
