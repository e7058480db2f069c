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

#include "dynode/autodiff/adam.h"

#include <cmath>

#include "dynode/common/errors.h"

namespace dynode::ad {

void AdamStep(std::span<Tensor* const> params,
              std::span<const Tensor* const> grads, AdamState& state,
              const AdamConfig& config) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam: parameter and gradient counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->SameShape(*grads[i])) {
      throw DimensionError("adam: gradient " + grads[i]->ShapeString() +
                           " for parameter " + params[i]->ShapeString());
    }
  }
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->size(), 0.0);
      state.v.emplace_back(p->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw DimensionError("adam: optimizer state built for another model");
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->data();
    auto g = grads[i]->data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != p.size()) {
      throw DimensionError("adam: optimizer state built for another model");
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p[k] -= config.lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void AdamStep(MlpParams& params, const MlpParams& grads, AdamState& state,
              const AdamConfig& config) {
  const std::vector<Tensor*> p = params.Tensors();
  const std::vector<const Tensor*> g = grads.Tensors();
  AdamStep(std::span<Tensor* const>(p), std::span<const Tensor* const>(g),
           state, config);
}

}  // namespace dynode::ad
