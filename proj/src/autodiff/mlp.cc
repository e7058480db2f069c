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

#include "dynode/autodiff/mlp.h"

#include <cmath>
#include <string>

#include "dynode/common/errors.h"

namespace dynode::ad {

std::size_t MlpParams::input_dim() const {
  return layers.empty() ? 0 : layers.front().weight.cols();
}

std::size_t MlpParams::output_dim() const {
  return layers.empty() ? 0 : layers.back().weight.rows();
}

std::size_t MlpParams::ParameterCount() const {
  std::size_t n = 0;
  for (const Layer& layer : layers) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<Tensor*> MlpParams::Tensors() {
  std::vector<Tensor*> out;
  for (Layer& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

std::vector<const Tensor*> MlpParams::Tensors() const {
  std::vector<const Tensor*> out;
  for (const Layer& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
  }
  return out;
}

void MlpParams::Validate() const {
  if (layers.empty()) throw DimensionError("mlp has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = layers[i];
    if (layer.weight.rank() != 2 || layer.bias.size() != layer.weight.rows()) {
      throw DimensionError("mlp layer " + std::to_string(i) +
                           " has inconsistent weight/bias shapes");
    }
    if (i > 0 && layers[i - 1].weight.rows() != layer.weight.cols()) {
      throw DimensionError("mlp layers " + std::to_string(i - 1) + " and " +
                           std::to_string(i) + " do not chain");
    }
  }
}

MlpParams InitMlp(std::span<const std::size_t> sizes, Activation activation,
                  OutputActivation output_activation, std::mt19937_64& rng,
                  bool zero_last_layer) {
  if (sizes.size() < 2) throw DimensionError("mlp needs at least two sizes");
  MlpParams params;
  params.activation = activation;
  params.output_activation = output_activation;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const std::size_t fan_in = sizes[i];
    const std::size_t fan_out = sizes[i + 1];
    Layer layer{Tensor::Zeros(fan_out, fan_in), Tensor::Vector(
                                                    std::vector<double>(fan_out))};
    const bool last = i + 2 == sizes.size();
    if (!(last && zero_last_layer)) {
      const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& w : layer.weight.data()) w = dist(rng);
      for (double& b : layer.bias.data()) b = dist(rng);
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpParams ZerosLike(const MlpParams& params) {
  MlpParams out = params;
  for (Tensor* t : out.Tensors()) {
    for (double& v : t->data()) v = 0.0;
  }
  return out;
}

BoundMlp::BoundMlp(const MlpParams& params, Tape& tape, bool trainable)
    : params_(&params), tape_(&tape) {
  params.Validate();
  for (const Layer& layer : params.layers) {
    weights_.push_back(trainable ? tape.Leaf(layer.weight)
                                 : tape.Constant(layer.weight));
    biases_.push_back(trainable ? tape.Leaf(layer.bias)
                                : tape.Constant(layer.bias));
  }
}

Var BoundMlp::Forward(Var input) const {
  if (input.tape() != tape_) throw std::invalid_argument("mlp input on another tape");
  if (input.value().cols() != params_->input_dim()) {
    throw DimensionError("mlp expects input width " +
                         std::to_string(params_->input_dim()) + ", got " +
                         input.value().ShapeString());
  }
  Var h = input;
  const std::size_t n = weights_.size();
  for (std::size_t i = 0; i < n; ++i) {
    h = Linear(h, weights_[i], biases_[i]);
    if (i + 1 < n) {
      h = params_->activation == Activation::kTanh ? Tanh(h) : Relu(h);
    } else if (params_->output_activation == OutputActivation::kTanh) {
      h = Tanh(h);
    }
  }
  return h;
}

MlpParams BoundMlp::Gradients() const {
  MlpParams grads = ZerosLike(*params_);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!tape_->requires_grad(weights_[i])) continue;
    grads.layers[i].weight = tape_->adjoint(weights_[i]);
    grads.layers[i].bias = tape_->adjoint(biases_[i]);
  }
  return grads;
}

Var ForwardMlp(const BoundMlp& mlp, Var input) { return mlp.Forward(input); }

Tensor EvaluateMlp(const MlpParams& params, const Tensor& input) {
  Tape tape;
  BoundMlp mlp(params, tape, /*trainable=*/false);
  return mlp.Forward(tape.Constant(input)).value();
}

}  // namespace dynode::ad
