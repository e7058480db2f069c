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

#include "dynode/rl/mve.h"

#include <cmath>
#include <stdexcept>

#include "dynode/common/errors.h"

namespace dynode::rl {

using ad::Tensor;

namespace {

Tensor Stack(const std::vector<Tensor>& parts) {
  if (parts.empty()) return {};
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const Tensor& p : parts) rows += p.rows();
  Tensor out = Tensor::Zeros(rows, cols);
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    std::copy(p.data().begin(), p.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.size();
  }
  return out;
}

bool RowFinite(std::span<const double> row) {
  for (double v : row) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// One imagined step. Rows the model cannot advance, or whose prediction is
// rejected, are flagged and keep their previous state as a placeholder.
Tensor ImagineStep(const MveContext& ctx, const Tensor& states,
                   const Tensor& actions, std::vector<bool>& diverged) {
  Tensor next;
  try {
    next = ctx.model(states, actions);
  } catch (const NumericError&) {
    next = Tensor::Zeros(states.rows(), states.cols());
    for (std::size_t b = 0; b < states.rows(); ++b) {
      const Tensor s = Tensor::Matrix(1, states.cols(), states.Row(b));
      const Tensor a = Tensor::Matrix(1, actions.cols(), actions.Row(b));
      try {
        next.SetRow(b, ctx.model(s, a).Row(0));
      } catch (const NumericError&) {
        next.SetRow(b, states.Row(b));
        diverged[b] = true;
      }
    }
  }
  for (std::size_t b = 0; b < next.rows(); ++b) {
    const std::vector<double> row = next.Row(b);
    if (!RowFinite(row) || (ctx.valid && !ctx.valid(row))) {
      next.SetRow(b, states.Row(b));
      diverged[b] = true;
    }
  }
  return next;
}

}  // namespace

Tensor ExpandedTargets::StackedObs() const { return Stack(obs); }
Tensor ExpandedTargets::StackedActions() const { return Stack(actions); }
Tensor ExpandedTargets::StackedTargets() const { return Stack(targets); }
Tensor ExpandedTargets::StackedWeights() const { return Stack(weights); }

ExpandedTargets MveTargets(const MveContext& ctx, const data::PairBatch& batch,
                           std::size_t horizon, std::mt19937_64& rng) {
  if (!ctx.reward || !ctx.observe || !ctx.policy || !ctx.target_q ||
      (horizon > 0 && !ctx.model)) {
    throw std::invalid_argument("value-expansion context is incomplete");
  }
  const std::size_t n = batch.states.rows();
  const std::size_t H = horizon;

  // States x_0..x_{H+1}, actions a_0..a_{H+1}, log-probs for j >= 1.
  std::vector<Tensor> x = {batch.states, batch.next_states};
  std::vector<Tensor> a = {batch.actions};
  std::vector<Tensor> obs = {ctx.observe(batch.states)};
  std::vector<Tensor> log_prob = {Tensor()};
  std::vector<std::vector<double>> rewards = {batch.rewards.vec()};
  // live[j][b]: x_j is reached without passing a terminal state.
  std::vector<std::vector<bool>> live(H + 2, std::vector<bool>(n, true));
  for (std::size_t b = 0; b < n; ++b) live[1][b] = batch.dones[b] == 0.0;
  std::vector<bool> diverged(n, false);

  for (std::size_t j = 1; j <= H + 1; ++j) {
    obs.push_back(ctx.observe(x[j]));
    ActionBatch sample = ctx.policy(obs[j], rng);
    a.push_back(std::move(sample.action));
    log_prob.push_back(std::move(sample.log_prob));
    if (j == H + 1) break;
    x.push_back(ImagineStep(ctx, x[j], a[j], diverged));
    std::vector<double> r(n);
    for (std::size_t b = 0; b < n; ++b) {
      const std::vector<double> s = x[j].Row(b), act = a[j].Row(b),
                                s_next = x[j + 1].Row(b);
      r[b] = ctx.reward(s, act, s_next);
      live[j + 1][b] =
          live[j][b] && !(ctx.terminal && ctx.terminal(s_next));
    }
    rewards.push_back(std::move(r));
  }

  // Bootstrap at x_{H+1}; for diverged samples also at x_1 (one step).
  const Tensor q_end = ctx.target_q(obs[H + 1], a[H + 1]);
  Tensor q_one;
  bool any_diverged = false;
  for (std::size_t b = 0; b < n; ++b) {
    any_diverged = any_diverged || (diverged[b] && live[1][b]);
  }
  if (H > 0 && any_diverged) q_one = ctx.target_q(obs[1], a[1]);

  ExpandedTargets out;
  std::vector<std::vector<double>> y(H + 2, std::vector<double>(n, 0.0));
  for (std::size_t b = 0; b < n; ++b) y[H + 1][b] = q_end[b];
  for (std::size_t jj = H + 1; jj-- > 0;) {
    for (std::size_t b = 0; b < n; ++b) {
      const double cont = live[jj + 1][b] ? 1.0 : 0.0;
      y[jj][b] = rewards[jj][b] +
                 ctx.gamma * cont *
                     (y[jj + 1][b] - ctx.alpha * log_prob[jj + 1][b]);
    }
  }
  std::vector<std::vector<double>> w(H + 1, std::vector<double>(n, 0.0));
  for (std::size_t b = 0; b < n; ++b) {
    const bool fallback = diverged[b] && live[1][b];
    if (fallback) {
      ++out.fallbacks;
      if (H > 0) {
        y[0][b] = rewards[0][b] +
                  ctx.gamma * (q_one[b] - ctx.alpha * log_prob[1][b]);
      }
    }
    std::size_t count = 1;
    if (!fallback) {
      for (std::size_t k = 1; k <= H; ++k) count += live[k][b] ? 1 : 0;
    }
    const double weight = 1.0 / (static_cast<double>(n) * count);
    w[0][b] = weight;
    if (!fallback) {
      for (std::size_t k = 1; k <= H; ++k) w[k][b] = live[k][b] ? weight : 0;
    }
  }
  for (std::size_t k = 0; k <= H; ++k) {
    out.obs.push_back(obs[k]);
    out.actions.push_back(a[k]);
    out.targets.push_back(Tensor::Matrix(n, 1, y[k]));
    out.weights.push_back(Tensor::Matrix(n, 1, w[k]));
  }
  return out;
}

}  // namespace dynode::rl
