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

// Per-dimension affine standardization of states.

#ifndef DYNODE_DATA_NORMALIZER_H_
#define DYNODE_DATA_NORMALIZER_H_

#include <span>
#include <vector>

#include "dynode/autodiff/tensor.h"

namespace dynode::data {

class Normalizer {
 public:
  static constexpr double kMinStd = 1e-6;

  Normalizer() = default;
  // Identity transform of the given dimension.
  explicit Normalizer(std::size_t dim);
  // Stds below kMinStd are raised to it.
  Normalizer(std::vector<double> mean, std::vector<double> std);

  // Population mean and std over the given samples (at least one).
  static Normalizer Fit(std::span<const std::vector<double>> samples);

  std::size_t dim() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& std() const { return std_; }

  std::vector<double> Normalize(std::span<const double> x) const;
  std::vector<double> Denormalize(std::span<const double> z) const;
  // Row-wise on [B x dim] tensors.
  ad::Tensor Normalize(const ad::Tensor& x) const;
  ad::Tensor Denormalize(const ad::Tensor& z) const;

  bool operator==(const Normalizer&) const = default;

 private:
  std::vector<double> mean_;
  std::vector<double> std_;
};

}  // namespace dynode::data

#endif  // DYNODE_DATA_NORMALIZER_H_
