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

// Binary MLP checkpoint.
//
// Layout (all integers and floats little-endian):
//   bytes 0..6   "DYNODE1"
//   u8           hidden activation (0 tanh, 1 relu)
//   u8           output activation (0 identity, 1 tanh)
//   u32          layer count L
//   L x (u32 out, u32 in)
//   for each layer: out*in f64 weights (row-major), then out f64 biases

#ifndef DYNODE_AUTODIFF_CHECKPOINT_H_
#define DYNODE_AUTODIFF_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "dynode/autodiff/mlp.h"

namespace dynode::ad {

inline constexpr char kCheckpointMagic[] = "DYNODE1";

std::string SerializeMlp(const MlpParams& params);
// Throws IoError on a bad magic, unknown enum, or truncated payload.
MlpParams DeserializeMlp(const std::string& bytes);

void SaveMlp(const std::filesystem::path& path, const MlpParams& params);
MlpParams LoadMlp(const std::filesystem::path& path);

}  // namespace dynode::ad

#endif  // DYNODE_AUTODIFF_CHECKPOINT_H_
