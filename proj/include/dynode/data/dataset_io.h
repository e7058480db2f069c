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

// Dataset persistence: one CSV per episode plus a JSON manifest.
//
// Episode CSV columns: step, s0..s{n-1}, a0..a{m-1}, r, done. Row t holds
// s_t, a_t and r_t; a final row holds the last state with empty action and
// reward cells. Numbers use the shortest round-tripping decimal form, so
// save/load is lossless and output bytes depend only on the data.

#ifndef DYNODE_DATA_DATASET_IO_H_
#define DYNODE_DATA_DATASET_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "dynode/data/replay.h"

namespace dynode::data {

struct DatasetInfo {
  std::string env;
  std::uint64_t seed = 0;
  std::size_t episode_length = 0;
};

// Writes manifest.json and episode_NNNN.csv into dir (created if needed).
// Throws IoError on failure.
void SaveDataset(const std::filesystem::path& dir, const ReplayBuffer& buffer,
                 const DatasetInfo& info);

// Throws IoError on missing or malformed files.
ReplayBuffer LoadDataset(const std::filesystem::path& dir,
                         DatasetInfo* info = nullptr);

}  // namespace dynode::data

#endif  // DYNODE_DATA_DATASET_IO_H_
