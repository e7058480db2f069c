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

#include "dynode/rl/policy.h"

#include <cmath>
#include <numbers>

#include "dynode/common/errors.h"

namespace dynode::rl {

using ad::Tensor;
using ad::Var;

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // log(2 pi) / 2

}  // namespace

ad::MlpParams InitPolicy(std::size_t obs_dim, std::size_t action_dim,
                         std::span<const std::size_t> hidden,
                         std::mt19937_64& rng) {
  std::vector<std::size_t> sizes = {obs_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(2 * action_dim);
  return ad::InitMlp(sizes, ad::Activation::kRelu,
                     ad::OutputActivation::kIdentity, rng);
}

PolicySample SamplePolicy(const ad::BoundMlp& policy, Var obs,
                          const Tensor& noise) {
  const std::size_t m = policy.params().output_dim() / 2;
  Var out = policy.Forward(obs);
  if (noise.rows() != out.value().rows() || noise.cols() != m) {
    throw DimensionError("policy noise " + noise.ShapeString() +
                         " for outputs " + out.value().ShapeString());
  }
  Var mean = ad::SliceCols(out, 0, m);
  Var log_std = ad::Clamp(ad::SliceCols(out, m, m), kLogStdMin, kLogStdMax);
  Var eps = obs.tape()->Constant(noise);
  Var u = ad::Add(mean, ad::Mul(ad::Exp(log_std), eps));
  Var action = ad::Tanh(u);
  // log N(u; mean, std) with (u - mean) / std = eps.
  Var gauss = ad::AddScalar(
      ad::Sub(ad::Scale(ad::Square(eps), -0.5), log_std), -kHalfLogTwoPi);
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)), stable for large |u|.
  Var log_jacobian = ad::Scale(
      ad::AddScalar(ad::Sub(ad::Scale(u, -1.0), ad::Softplus(ad::Scale(u, -2.0))),
                    std::numbers::ln2),
      2.0);
  return {action, ad::RowSum(ad::Sub(gauss, log_jacobian))};
}

ActionBatch SampleActions(const ad::MlpParams& policy, const Tensor& obs,
                          const Tensor& noise) {
  ad::Tape tape;
  ad::BoundMlp net(policy, tape, /*trainable=*/false);
  PolicySample s = SamplePolicy(net, tape.Constant(obs), noise);
  return {s.action.value(), s.log_prob.value()};
}

ActionBatch SampleActions(const ad::MlpParams& policy, const Tensor& obs,
                          std::mt19937_64& rng) {
  return SampleActions(
      policy, obs, GaussianNoise(obs.rows(), policy.output_dim() / 2, rng));
}

Tensor MeanActions(const ad::MlpParams& policy, const Tensor& obs) {
  ad::Tape tape;
  ad::BoundMlp net(policy, tape, /*trainable=*/false);
  Var out = net.Forward(tape.Constant(obs));
  return ad::Tanh(ad::SliceCols(out, 0, policy.output_dim() / 2)).value();
}

Tensor GaussianNoise(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor noise = Tensor::Zeros(rows, cols);
  for (double& v : noise.data()) v = normal(rng);
  return noise;
}

double SquashedGaussianLogDensity(double action, double mean, double log_std) {
  const double u = std::atanh(action);
  const double z = (u - mean) / std::exp(log_std);
  return -0.5 * z * z - log_std - kHalfLogTwoPi - std::log1p(-action * action);
}

}  // namespace dynode::rl
