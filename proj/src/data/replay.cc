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

#include "dynode/data/replay.h"

#include <stdexcept>
#include <string>

#include "dynode/common/errors.h"

namespace dynode::data {

using ad::Tensor;

Transition Episode::At(std::size_t t) const {
  return {states[t], actions[t], rewards[t], states[t + 1],
          terminated && t + 1 == actions.size()};
}

ReplayBuffer::ReplayBuffer(std::size_t state_dim, std::size_t action_dim,
                           std::size_t capacity)
    : state_dim_(state_dim), action_dim_(action_dim), capacity_(capacity) {}

void ReplayBuffer::Add(const Transition& t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
      t.action.size() != action_dim_) {
    throw DimensionError("replay buffer: transition dimensions do not match");
  }
  if (episodes_.empty() || episodes_.back().closed) {
    episodes_.push_back({});
    episodes_.back().states.push_back(t.state);
  } else if (episodes_.back().states.back() != t.state) {
    throw std::invalid_argument(
        "replay buffer: transition does not continue the open episode");
  }
  Episode& episode = episodes_.back();
  episode.actions.push_back(t.action);
  episode.rewards.push_back(t.reward);
  episode.states.push_back(t.next_state);
  ++size_;
  if (t.done) {
    episode.terminated = true;
    episode.closed = true;
  }
  Evict();
}

void ReplayBuffer::CloseEpisode() {
  if (!episodes_.empty()) episodes_.back().closed = true;
}

void ReplayBuffer::Evict() {
  if (capacity_ == 0) return;
  while (size_ > capacity_ && episodes_.size() > 1) {
    size_ -= episodes_.front().length();
    episodes_.erase(episodes_.begin());
  }
}

Transition ReplayBuffer::At(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("replay buffer index");
  for (const Episode& episode : episodes_) {
    if (index < episode.length()) return episode.At(index);
    index -= episode.length();
  }
  throw std::logic_error("replay buffer size out of sync");
}

std::vector<Vec> ReplayBuffer::AllStates() const {
  std::vector<Vec> states;
  for (const Episode& episode : episodes_) {
    states.insert(states.end(), episode.states.begin(), episode.states.end());
  }
  return states;
}

std::vector<Transition> ReplayBuffer::SamplePairs(std::size_t batch,
                                                  std::mt19937_64& rng) const {
  if (empty()) throw std::logic_error("cannot sample from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> indices(batch);
  for (std::size_t& i : indices) i = pick(rng);
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t index : indices) {
    std::size_t e = 0;
    while (index >= episodes_[e].length()) index -= episodes_[e++].length();
    out.push_back(episodes_[e].At(index));
  }
  return out;
}

PairBatch ReplayBuffer::SamplePairBatch(std::size_t batch,
                                        std::mt19937_64& rng) const {
  return ToPairBatch(SamplePairs(batch, rng));
}

std::size_t ReplayBuffer::CountWindows(std::size_t horizon) const {
  std::size_t count = 0;
  for (const Episode& episode : episodes_) {
    if (episode.length() >= horizon) count += episode.length() - horizon + 1;
  }
  return count;
}

std::vector<Rollout> ReplayBuffer::SampleSequences(std::size_t batch,
                                                   std::size_t horizon,
                                                   std::mt19937_64& rng) const {
  if (horizon == 0) throw std::invalid_argument("sequence horizon must be >= 1");
  const std::size_t windows = CountWindows(horizon);
  if (windows == 0) {
    throw std::logic_error("no episode has " + std::to_string(horizon) +
                           " or more steps");
  }
  std::uniform_int_distribution<std::size_t> pick(0, windows - 1);
  std::vector<Rollout> out;
  out.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t index = pick(rng);
    for (const Episode& episode : episodes_) {
      if (episode.length() < horizon) continue;
      const std::size_t starts = episode.length() - horizon + 1;
      if (index < starts) {
        out.push_back(WindowOf(episode, index, horizon));
        break;
      }
      index -= starts;
    }
  }
  return out;
}

Rollout WindowOf(const Episode& episode, std::size_t start,
                 std::size_t horizon) {
  if (start + horizon > episode.length()) {
    throw std::out_of_range("window exceeds episode");
  }
  Rollout r;
  r.start = episode.states[start];
  r.actions.assign(episode.actions.begin() + start,
                   episode.actions.begin() + start + horizon);
  r.states.assign(episode.states.begin() + start + 1,
                  episode.states.begin() + start + horizon + 1);
  return r;
}

PairBatch ToPairBatch(std::span<const Transition> transitions) {
  if (transitions.empty()) throw std::invalid_argument("empty transition batch");
  const std::size_t b = transitions.size();
  const std::size_t n = transitions[0].state.size();
  const std::size_t m = transitions[0].action.size();
  PairBatch batch{Tensor::Zeros(b, n), Tensor::Zeros(b, m), Tensor::Zeros(b, 1),
                  Tensor::Zeros(b, n), Tensor::Zeros(b, 1)};
  for (std::size_t i = 0; i < b; ++i) {
    batch.states.SetRow(i, transitions[i].state);
    batch.actions.SetRow(i, transitions[i].action);
    batch.rewards[i] = transitions[i].reward;
    batch.next_states.SetRow(i, transitions[i].next_state);
    batch.dones[i] = transitions[i].done ? 1.0 : 0.0;
  }
  return batch;
}

SequenceBatch ToSequenceBatch(std::span<const Rollout> rollouts) {
  if (rollouts.empty()) throw std::invalid_argument("empty rollout batch");
  const std::size_t b = rollouts.size();
  const std::size_t horizon = rollouts[0].horizon();
  if (horizon == 0) throw std::invalid_argument("rollout horizon must be >= 1");
  const std::size_t n = rollouts[0].start.size();
  const std::size_t m = rollouts[0].actions[0].size();
  SequenceBatch batch;
  batch.start = Tensor::Zeros(b, n);
  batch.actions.assign(horizon, Tensor::Zeros(b, m));
  batch.states.assign(horizon, Tensor::Zeros(b, n));
  for (std::size_t i = 0; i < b; ++i) {
    if (rollouts[i].horizon() != horizon) {
      throw DimensionError("rollouts in a batch must share a horizon");
    }
    batch.start.SetRow(i, rollouts[i].start);
    for (std::size_t h = 0; h < horizon; ++h) {
      batch.actions[h].SetRow(i, rollouts[i].actions[h]);
      batch.states[h].SetRow(i, rollouts[i].states[h]);
    }
  }
  return batch;
}

void AddStateNoise(Tensor& states, double sigma, std::mt19937_64& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (sigma == 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : states.data()) v += noise(rng);
}

}  // namespace dynode::data
