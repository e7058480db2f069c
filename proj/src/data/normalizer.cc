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

#include "dynode/data/normalizer.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dynode/common/errors.h"

namespace dynode::data {

Normalizer::Normalizer(std::size_t dim) : mean_(dim, 0.0), std_(dim, 1.0) {}

Normalizer::Normalizer(std::vector<double> mean, std::vector<double> std)
    : mean_(std::move(mean)), std_(std::move(std)) {
  if (mean_.size() != std_.size()) {
    throw DimensionError("normalizer mean and std sizes differ");
  }
  for (double& s : std_) s = std::max(s, kMinStd);
}

Normalizer Normalizer::Fit(std::span<const std::vector<double>> samples) {
  if (samples.empty()) throw std::invalid_argument("normalizer needs samples");
  const std::size_t dim = samples[0].size();
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& x : samples) {
    if (x.size() != dim) throw DimensionError("normalizer sample size differs");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += x[i];
  }
  const double n = static_cast<double>(samples.size());
  for (double& m : mean) m /= n;
  for (const auto& x : samples) {
    for (std::size_t i = 0; i < dim; ++i) {
      var[i] += (x[i] - mean[i]) * (x[i] - mean[i]);
    }
  }
  std::vector<double> std(dim);
  for (std::size_t i = 0; i < dim; ++i) std[i] = std::sqrt(var[i] / n);
  return Normalizer(std::move(mean), std::move(std));
}

std::vector<double> Normalizer::Normalize(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionError("normalize: dimension mismatch");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean_[i]) / std_[i];
  return z;
}

std::vector<double> Normalizer::Denormalize(std::span<const double> z) const {
  if (z.size() != dim()) throw DimensionError("denormalize: dimension mismatch");
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] * std_[i] + mean_[i];
  return x;
}

ad::Tensor Normalizer::Normalize(const ad::Tensor& x) const {
  if (x.cols() != dim()) throw DimensionError("normalize: dimension mismatch");
  ad::Tensor z = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < dim(); ++c) {
      z.at(r, c) = (x.at(r, c) - mean_[c]) / std_[c];
    }
  }
  return z;
}

ad::Tensor Normalizer::Denormalize(const ad::Tensor& z) const {
  if (z.cols() != dim()) throw DimensionError("denormalize: dimension mismatch");
  ad::Tensor x = z;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    for (std::size_t c = 0; c < dim(); ++c) {
      x.at(r, c) = z.at(r, c) * std_[c] + mean_[c];
    }
  }
  return x;
}

}  // namespace dynode::data
