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

#ifndef DYNODE_AUTODIFF_MLP_H_
#define DYNODE_AUTODIFF_MLP_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dynode/autodiff/tape.h"
#include "dynode/autodiff/tensor.h"

namespace dynode::ad {

enum class Activation : std::uint8_t { kTanh = 0, kRelu = 1 };
enum class OutputActivation : std::uint8_t { kIdentity = 0, kTanh = 1 };

struct Layer {
  Tensor weight;  // [out x in]
  Tensor bias;    // [out]

  bool operator==(const Layer&) const = default;
};

// Fully connected network: hidden layers use `activation`, the last layer
// uses `output_activation`.
struct MlpParams {
  std::vector<Layer> layers;
  Activation activation = Activation::kTanh;
  OutputActivation output_activation = OutputActivation::kIdentity;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t ParameterCount() const;

  // Weight and bias tensors in layer order.
  std::vector<Tensor*> Tensors();
  std::vector<const Tensor*> Tensors() const;

  // Throws DimensionError unless consecutive layers chain.
  void Validate() const;

  bool operator==(const MlpParams&) const = default;
};

// `sizes` lists every width including input and output, e.g. {3, 64, 64, 2}.
// Weights and biases are uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
// With `zero_last_layer` the final weight and bias are exactly zero.
MlpParams InitMlp(std::span<const std::size_t> sizes, Activation activation,
                  OutputActivation output_activation, std::mt19937_64& rng,
                  bool zero_last_layer = false);

// Same layer shapes, all zeros.
MlpParams ZerosLike(const MlpParams& params);

// Parameters of an MLP registered on a tape as leaves (or constants, for
// networks that must not receive gradients). Binding once and calling
// Forward repeatedly shares the leaves, so gradients from every call
// accumulate, as needed for an unrolled solve.
class BoundMlp {
 public:
  BoundMlp(const MlpParams& params, Tape& tape, bool trainable = true);

  Var Forward(Var input) const;
  // Adjoints of the bound leaves, shaped like the parameters. Valid after
  // tape.Backward(); zeros for unreached parameters.
  MlpParams Gradients() const;

  const MlpParams& params() const { return *params_; }
  Tape& tape() const { return *tape_; }

 private:
  const MlpParams* params_;
  Tape* tape_;
  std::vector<Var> weights_;
  std::vector<Var> biases_;
};

Var ForwardMlp(const BoundMlp& mlp, Var input);

// Evaluates on a scratch tape; input is [B x in] or [in].
Tensor EvaluateMlp(const MlpParams& params, const Tensor& input);

}  // namespace dynode::ad

#endif  // DYNODE_AUTODIFF_MLP_H_
