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

// Environment interaction for building datasets.

#ifndef DYNODE_DATA_COLLECT_H_
#define DYNODE_DATA_COLLECT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dynode/data/replay.h"
#include "dynode/envs/environment.h"

namespace dynode::data {

inline constexpr std::size_t kDefaultEpisodeLength = 200;

// Maps (state, rng) to an action in [-1, 1]^action_dim.
using Policy =
    std::function<Vec(std::span<const double> state, std::mt19937_64& rng)>;

Policy UniformRandomPolicy(std::size_t action_dim);

// Runs `policy` until exactly n_samples transitions are stored, starting a
// new episode on termination or after episode_length steps. Throws
// std::invalid_argument if n_samples or episode_length is zero.
ReplayBuffer Collect(const envs::Environment& env, std::size_t n_samples,
                     std::size_t episode_length, const Policy& policy,
                     std::mt19937_64& rng);

// Uniform random actions; deterministic per seed.
ReplayBuffer CollectRandom(const envs::Environment& env, std::size_t n_samples,
                           std::size_t episode_length, std::uint64_t seed);

}  // namespace dynode::data

#endif  // DYNODE_DATA_COLLECT_H_
