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

// Replay storage with explicit episode boundaries, plus uniform pair and
// sequence sampling.

#ifndef DYNODE_DATA_REPLAY_H_
#define DYNODE_DATA_REPLAY_H_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "dynode/autodiff/tensor.h"

namespace dynode::data {

using Vec = std::vector<double>;

struct Transition {
  Vec state;
  Vec action;
  double reward = 0.0;
  Vec next_state;
  bool done = false;  // true only for genuine terminal states, not time limits
};

// One contiguous trajectory: states has one more entry than actions.
struct Episode {
  std::vector<Vec> states;
  std::vector<Vec> actions;
  std::vector<double> rewards;
  bool terminated = false;  // last state is terminal
  bool closed = false;      // no further transitions will be appended

  std::size_t length() const { return actions.size(); }
  Transition At(std::size_t t) const;
};

// A start state, H actions and the H true successor states.
struct Rollout {
  Vec start;
  std::vector<Vec> actions;
  std::vector<Vec> states;

  std::size_t horizon() const { return actions.size(); }
};

// Batched tensors: states/next_states [B x state_dim], actions [B x
// action_dim], rewards and dones [B x 1].
struct PairBatch {
  ad::Tensor states;
  ad::Tensor actions;
  ad::Tensor rewards;
  ad::Tensor next_states;
  ad::Tensor dones;
};

// start [B x state_dim]; actions[h] and states[h] are [B x dim] per step.
struct SequenceBatch {
  ad::Tensor start;
  std::vector<ad::Tensor> actions;
  std::vector<ad::Tensor> states;

  std::size_t batch() const { return start.rows(); }
  std::size_t horizon() const { return actions.size(); }
};

class ReplayBuffer {
 public:
  // capacity == 0 means unbounded; otherwise whole oldest episodes are
  // evicted once the transition count exceeds capacity.
  ReplayBuffer(std::size_t state_dim, std::size_t action_dim,
               std::size_t capacity = 0);

  // Appends to the open episode, opening one at t.state if none is open.
  // An episode closes when t.done is set or CloseEpisode() is called.
  // Throws DimensionError on size mismatch and std::invalid_argument if
  // t.state does not continue the open episode.
  void Add(const Transition& t);
  void CloseEpisode();

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const std::vector<Episode>& episodes() const { return episodes_; }

  // Transition by flat index in insertion order.
  Transition At(std::size_t index) const;
  // Every stored state (episode starts included, no duplicates).
  std::vector<Vec> AllStates() const;

  // Uniform with replacement over transitions. Throws std::logic_error if
  // the buffer is empty.
  std::vector<Transition> SamplePairs(std::size_t batch,
                                      std::mt19937_64& rng) const;
  PairBatch SamplePairBatch(std::size_t batch, std::mt19937_64& rng) const;

  // Number of windows of length horizon that stay inside one episode.
  std::size_t CountWindows(std::size_t horizon) const;
  // Uniform with replacement over all valid window starts. Throws
  // std::logic_error if no episode is long enough.
  std::vector<Rollout> SampleSequences(std::size_t batch, std::size_t horizon,
                                       std::mt19937_64& rng) const;

 private:
  void Evict();

  std::size_t state_dim_;
  std::size_t action_dim_;
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::vector<Episode> episodes_;
};

// The window of `horizon` steps starting at step `start` of an episode.
Rollout WindowOf(const Episode& episode, std::size_t start,
                 std::size_t horizon);

PairBatch ToPairBatch(std::span<const Transition> transitions);
// All rollouts must share a horizon >= 1.
SequenceBatch ToSequenceBatch(std::span<const Rollout> rollouts);

// Adds i.i.d. N(0, sigma^2) noise to every entry. sigma must be >= 0;
// sigma == 0 leaves the tensor bit-identical.
void AddStateNoise(ad::Tensor& states, double sigma, std::mt19937_64& rng);

}  // namespace dynode::data

#endif  // DYNODE_DATA_REPLAY_H_
