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

#include "dynode/models/dynamics_model.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dynode/autodiff/checkpoint.h"
#include "dynode/common/errors.h"

namespace dynode::models {

using ad::Tensor;
using ad::Var;

std::string ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBaseline: return "nn";
    case ModelKind::kDynodeEuler: return "dynode-euler";
    case ModelKind::kDynodeRk4: return "dynode-rk4";
  }
  return "unknown";
}

ModelKind ParseModelKind(const std::string& name) {
  if (name == "nn") return ModelKind::kBaseline;
  if (name == "dynode-euler") return ModelKind::kDynodeEuler;
  if (name == "dynode-rk4") return ModelKind::kDynodeRk4;
  throw std::invalid_argument("unknown model '" + name +
                              "' (expected nn, dynode-euler or dynode-rk4)");
}

bool IsDynode(ModelKind kind) { return kind != ModelKind::kBaseline; }

Var NetField::Evaluate(Var state, Var action) const {
  return net_.Forward(ad::ConcatCols(state, action));
}

namespace {

Tensor Tile(const std::vector<double>& row, std::size_t rows) {
  Tensor t = Tensor::Zeros(rows, row.size());
  for (std::size_t r = 0; r < rows; ++r) t.SetRow(r, row);
  return t;
}

}  // namespace

Var NormalizedField::Evaluate(Var state, Var action) const {
  ad::Tape& tape = *state.tape();
  const std::size_t rows = state.value().rows();
  Var std = tape.Constant(Tile(normalizer_.std(), rows));
  Var mean = tape.Constant(Tile(normalizer_.mean(), rows));
  Var raw_state = ad::Add(ad::Mul(state, std), mean);
  return ad::Div(raw_.Evaluate(raw_state, action), std);
}

DynamicsModel::DynamicsModel(const ModelConfig& config, std::size_t state_dim,
                             std::size_t action_dim, std::mt19937_64& rng)
    : kind_(config.kind),
      normalizer_(state_dim),
      solver_{config.kind == ModelKind::kDynodeRk4 ? ode::Method::kRk4
                                                   : ode::Method::kEuler,
              config.substeps, config.dt} {
  solver_.Validate();
  std::vector<std::size_t> sizes = {state_dim + action_dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(state_dim);
  net_ = ad::InitMlp(sizes, config.activation, ad::OutputActivation::kIdentity,
                     rng, /*zero_last_layer=*/true);
}

DynamicsModel::DynamicsModel(ModelKind kind, ad::MlpParams net,
                             data::Normalizer normalizer,
                             ode::SolverConfig solver)
    : kind_(kind),
      net_(std::move(net)),
      normalizer_(std::move(normalizer)),
      solver_(solver) {
  net_.Validate();
  solver_.Validate();
  if (net_.input_dim() <= net_.output_dim() ||
      normalizer_.dim() != net_.output_dim()) {
    throw DimensionError("dynamics model: network " +
                         std::to_string(net_.input_dim()) + "->" +
                         std::to_string(net_.output_dim()) +
                         " does not fit normalizer of dim " +
                         std::to_string(normalizer_.dim()));
  }
}

void DynamicsModel::set_normalizer(data::Normalizer normalizer) {
  if (normalizer.dim() != state_dim()) {
    throw DimensionError("normalizer dimension does not match the model");
  }
  normalizer_ = std::move(normalizer);
}

Var DynamicsModel::StepNormalized(const ad::BoundMlp& net, Var z,
                                  Var a) const {
  if (IsDynode(kind_)) {
    return StepWithField(NetField(net, state_dim(), action_dim()), z, a);
  }
  return ad::Add(z, net.Forward(ad::ConcatCols(z, a)));
}

Var DynamicsModel::StepWithField(const ode::DerivativeField& field, Var z,
                                 Var a) const {
  if (!IsDynode(kind_)) {
    throw std::logic_error("the baseline model has no derivative field");
  }
  return ode::OdeStep(field, z, a, solver_);
}

std::vector<Var> DynamicsModel::UnrollNormalized(
    const ad::BoundMlp& net, Var z0, std::span<const Var> actions) const {
  if (actions.empty()) throw std::invalid_argument("unroll needs H >= 1");
  std::vector<Var> states;
  states.reserve(actions.size());
  Var z = z0;
  for (std::size_t h = 0; h < actions.size(); ++h) {
    try {
      z = StepNormalized(net, z, actions[h]);
    } catch (const NumericError& e) {
      throw NumericError("unroll horizon " + std::to_string(h) + ": " +
                         e.what());
    }
    states.push_back(z);
  }
  return states;
}

std::vector<Tensor> DynamicsModel::UnrollToNormalized(
    const Tensor& start, std::span<const Tensor> actions) const {
  ad::Tape tape;
  ad::BoundMlp net(net_, tape, /*trainable=*/false);
  std::vector<Var> action_vars;
  action_vars.reserve(actions.size());
  for (const Tensor& a : actions) action_vars.push_back(tape.Constant(a));
  const auto states = UnrollNormalized(
      net, tape.Constant(normalizer_.Normalize(start)), action_vars);
  std::vector<Tensor> out;
  out.reserve(states.size());
  for (Var s : states) out.push_back(s.value());
  return out;
}

std::vector<Tensor> DynamicsModel::Unroll(
    const Tensor& start, std::span<const Tensor> actions) const {
  std::vector<Tensor> out = UnrollToNormalized(start, actions);
  for (Tensor& t : out) t = normalizer_.Denormalize(t);
  return out;
}

Tensor DynamicsModel::PredictNext(const Tensor& states,
                                  const Tensor& actions) const {
  const Tensor actions_copy = actions;
  return Unroll(states, std::span<const Tensor>(&actions_copy, 1))[0];
}

Var PathLoss(std::span<const Var> predictions, std::span<const Tensor> targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw DimensionError("path loss needs H >= 1 predictions and H targets");
  }
  ad::Tape& tape = *predictions[0].tape();
  Var total;
  for (std::size_t h = 0; h < predictions.size(); ++h) {
    Var term = ad::Mean(
        ad::Abs(ad::Sub(predictions[h], tape.Constant(targets[h]))));
    total = h == 0 ? term : ad::Add(total, term);
  }
  return ad::Scale(total, 1.0 / static_cast<double>(predictions.size()));
}

void SaveModel(const std::filesystem::path& prefix, const DynamicsModel& model,
               std::size_t horizon) {
  std::filesystem::path bin = prefix;
  bin += ".bin";
  std::filesystem::path meta = prefix;
  meta += ".json";
  ad::SaveMlp(bin, model.net());
  nlohmann::ordered_json j;
  j["format"] = "dynode-model-1";
  j["model"] = ModelKindName(model.kind());
  j["solver"] = ode::MethodName(model.solver().method);
  j["substeps"] = model.solver().substeps;
  j["dt"] = model.solver().dt;
  j["horizon"] = horizon;
  j["state_dim"] = model.state_dim();
  j["action_dim"] = model.action_dim();
  j["normalizer_mean"] = model.normalizer().mean();
  j["normalizer_std"] = model.normalizer().std();
  std::ofstream out(meta, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("cannot write " + meta.string());
}

DynamicsModel LoadModel(const std::filesystem::path& prefix,
                        std::size_t* horizon) {
  std::filesystem::path bin = prefix;
  bin += ".bin";
  std::filesystem::path meta = prefix;
  meta += ".json";
  std::ifstream in(meta, std::ios::binary);
  if (!in) {
    throw IoError("missing model checkpoint " + meta.string() +
                  " (run train-model first)");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const nlohmann::json j = nlohmann::json::parse(ss.str());
    const ModelKind kind = ParseModelKind(j.at("model").get<std::string>());
    const ode::SolverConfig solver{
        ode::ParseMethod(j.at("solver").get<std::string>()),
        j.at("substeps").get<int>(), j.at("dt").get<double>()};
    data::Normalizer normalizer(
        j.at("normalizer_mean").get<std::vector<double>>(),
        j.at("normalizer_std").get<std::vector<double>>());
    if (horizon != nullptr) *horizon = j.at("horizon").get<std::size_t>();
    return DynamicsModel(kind, ad::LoadMlp(bin), std::move(normalizer), solver);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(meta.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(meta.string() + ": " + e.what());
  }
}

}  // namespace dynode::models
