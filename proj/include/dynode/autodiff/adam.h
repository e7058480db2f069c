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

#ifndef DYNODE_AUTODIFF_ADAM_H_
#define DYNODE_AUTODIFF_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dynode/autodiff/mlp.h"
#include "dynode/autodiff/tensor.h"

namespace dynode::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment estimates, one buffer per parameter tensor.
// Allocated on the first step.
struct AdamState {
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// In-place Adam update with bias correction. Throws DimensionError when a
// gradient's shape differs from its parameter's or the state was built for a
// different parameter list.
void AdamStep(std::span<Tensor* const> params,
              std::span<const Tensor* const> grads, AdamState& state,
              const AdamConfig& config);

void AdamStep(MlpParams& params, const MlpParams& grads, AdamState& state,
              const AdamConfig& config);

}  // namespace dynode::ad

#endif  // DYNODE_AUTODIFF_ADAM_H_
