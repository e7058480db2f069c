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

#include "dynode/autodiff/tensor.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

#include "dynode/common/errors.h"

namespace dynode::ad {
namespace {

std::size_t Product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void CheckShape(const std::vector<std::size_t>& shape) {
  if (shape.empty() || shape.size() > 2) {
    throw DimensionError("tensor rank must be 1 or 2");
  }
  for (std::size_t d : shape) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  CheckShape(shape_);
  data_.assign(Product(shape_), 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  CheckShape(shape_);
  if (Product(shape_) != data_.size()) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + ShapeString());
  }
}

Tensor Tensor::Zeros(std::size_t rows, std::size_t cols) {
  return Tensor({rows, cols});
}

Tensor Tensor::Filled(std::size_t rows, std::size_t cols, double value) {
  return Tensor({rows, cols}, std::vector<double>(rows * cols, value));
}

Tensor Tensor::Scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::Vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
  return shape_.size() == 2 ? shape_[0] : (shape_.empty() ? 0 : 1);
}

std::size_t Tensor::cols() const { return shape_.empty() ? 0 : shape_.back(); }

std::vector<double> Tensor::Row(std::size_t r) const {
  const std::size_t n = cols();
  return {data_.begin() + r * n, data_.begin() + (r + 1) * n};
}

void Tensor::SetRow(std::size_t r, std::span<const double> values) {
  const std::size_t n = cols();
  if (values.size() != n) throw DimensionError("row length mismatch");
  std::copy(values.begin(), values.end(), data_.begin() + r * n);
}

bool Tensor::AllFinite() const {
  // A double is NaN or Inf exactly when all exponent bits are set. The
  // branch-free form vectorizes.
  constexpr std::uint64_t kExponent = 0x7ff0000000000000ULL;
  std::uint64_t any = 0;
  for (double v : data_) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    any |= static_cast<std::uint64_t>((bits & kExponent) == kExponent);
  }
  return any == 0;
}

std::string Tensor::ShapeString() const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out << "x";
    out << shape_[i];
  }
  out << "]";
  return out.str();
}

Tensor StackRows(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw DimensionError("cannot stack zero rows");
  const std::size_t n = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw DimensionError("ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor::Matrix(rows.size(), n, std::move(data));
}

}  // namespace dynode::ad
