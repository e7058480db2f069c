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

#include "dynode/autodiff/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dynode/common/errors.h"

namespace dynode::ad {
namespace {

constexpr std::size_t kMagicLength = sizeof(kCheckpointMagic) - 1;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint8_t U8() {
    Need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++]))
           << (8 * i);
    }
    return v;
  }

  double F64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++]))
           << (8 * i);
    }
    return std::bit_cast<double>(v);
  }

  std::string Bytes(std::size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw IoError("checkpoint truncated");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeMlp(const MlpParams& params) {
  params.Validate();
  std::string out(kCheckpointMagic, kMagicLength);
  out.push_back(static_cast<char>(params.activation));
  out.push_back(static_cast<char>(params.output_activation));
  PutU32(out, static_cast<std::uint32_t>(params.layers.size()));
  for (const Layer& layer : params.layers) {
    PutU32(out, static_cast<std::uint32_t>(layer.weight.rows()));
    PutU32(out, static_cast<std::uint32_t>(layer.weight.cols()));
  }
  for (const Layer& layer : params.layers) {
    for (double w : layer.weight.data()) PutF64(out, w);
    for (double b : layer.bias.data()) PutF64(out, b);
  }
  return out;
}

MlpParams DeserializeMlp(const std::string& bytes) {
  Reader in(bytes);
  if (in.Bytes(kMagicLength) != std::string(kCheckpointMagic, kMagicLength)) {
    throw IoError("not a DYNODE1 checkpoint");
  }
  MlpParams params;
  const std::uint8_t act = in.U8();
  const std::uint8_t out_act = in.U8();
  if (act > 1 || out_act > 1) throw IoError("checkpoint: unknown activation");
  params.activation = static_cast<Activation>(act);
  params.output_activation = static_cast<OutputActivation>(out_act);
  const std::uint32_t count = in.U32();
  if (count == 0) throw IoError("checkpoint: zero layers");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t rows = in.U32();
    const std::uint32_t cols = in.U32();
    if (rows == 0 || cols == 0) throw IoError("checkpoint: empty layer");
    shapes.emplace_back(rows, cols);
  }
  for (const auto& [rows, cols] : shapes) {
    Layer layer{Tensor::Zeros(rows, cols),
                Tensor::Vector(std::vector<double>(rows))};
    for (double& w : layer.weight.data()) w = in.F64();
    for (double& b : layer.bias.data()) b = in.F64();
    params.layers.push_back(std::move(layer));
  }
  if (!in.AtEnd()) throw IoError("checkpoint: trailing bytes");
  try {
    params.Validate();
  } catch (const DimensionError& e) {
    throw IoError(std::string("checkpoint: ") + e.what());
  }
  return params;
}

void SaveMlp(const std::filesystem::path& path, const MlpParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = SerializeMlp(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

MlpParams LoadMlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeMlp(buffer.str());
}

}  // namespace dynode::ad
