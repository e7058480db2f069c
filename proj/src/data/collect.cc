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

#include "dynode/data/collect.h"

#include <stdexcept>

namespace dynode::data {

Policy UniformRandomPolicy(std::size_t action_dim) {
  return [action_dim](std::span<const double>, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec a(action_dim);
    for (double& v : a) v = u(rng);
    return a;
  };
}

ReplayBuffer Collect(const envs::Environment& env, std::size_t n_samples,
                     std::size_t episode_length, const Policy& policy,
                     std::mt19937_64& rng) {
  if (n_samples == 0) throw std::invalid_argument("n_samples must be >= 1");
  if (episode_length == 0) {
    throw std::invalid_argument("episode_length must be >= 1");
  }
  const envs::EnvSpec& spec = env.spec();
  ReplayBuffer buffer(spec.state_dim, spec.action_dim);
  while (buffer.size() < n_samples) {
    Vec state = env.Reset(rng);
    for (std::size_t t = 0; t < episode_length && buffer.size() < n_samples;
         ++t) {
      Vec action = policy(state, rng);
      envs::StepResult step = env.Step(state, action);
      buffer.Add({state, action, step.reward, step.next_state, step.done});
      if (step.done) break;
      state = std::move(step.next_state);
    }
    buffer.CloseEpisode();
  }
  return buffer;
}

ReplayBuffer CollectRandom(const envs::Environment& env, std::size_t n_samples,
                           std::size_t episode_length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Collect(env, n_samples, episode_length,
                 UniformRandomPolicy(env.spec().action_dim), rng);
}

}  // namespace dynode::data
