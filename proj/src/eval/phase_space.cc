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

#include "dynode/eval/phase_space.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "dynode/common/errors.h"
#include "dynode/eval/svg.h"

namespace dynode::eval {

using ad::Tensor;

data::Rollout EnergyPumpingRollout(const envs::Environment& env,
                                   const data::Vec& start,
                                   std::size_t max_steps) {
  if (env.spec().state_dim < 2 || env.spec().action_dim != 1) {
    throw std::invalid_argument(
        "energy pumping needs a (position, velocity) state and one action");
  }
  data::Rollout rollout;
  rollout.start = start;
  data::Vec state = start;
  for (std::size_t h = 0; h < max_steps; ++h) {
    data::Vec action{state[1] >= 0.0 ? 1.0 : -1.0};
    envs::StepResult step = env.Step(state, action);
    state = step.next_state;
    rollout.actions.push_back(std::move(action));
    rollout.states.push_back(state);
    if (step.done) break;
  }
  return rollout;
}

PhaseTrajectory TruthTrajectory(const data::Rollout& rollout) {
  PhaseTrajectory t{"ground truth", {rollout.start}};
  t.states.insert(t.states.end(), rollout.states.begin(),
                  rollout.states.end());
  return t;
}

PhaseTrajectory ReconstructTrajectory(const Predictor& predictor,
                                      const data::Rollout& rollout,
                                      std::string label) {
  if (rollout.horizon() == 0) throw std::invalid_argument("empty rollout");
  std::vector<Tensor> actions;
  actions.reserve(rollout.horizon());
  for (const auto& a : rollout.actions) actions.push_back(Tensor::Matrix(1, a.size(), a));
  std::vector<Tensor> predicted;
  try {
    predicted = predictor(Tensor::Matrix(1, rollout.start.size(), rollout.start), actions);
  } catch (const NumericError& e) {
    throw NumericError(std::string("unroll failure: ") + e.what());
  }
  PhaseTrajectory t{std::move(label), {rollout.start}};
  for (std::size_t h = 0; h < predicted.size(); ++h) {
    if (!predicted[h].AllFinite()) {
      throw NumericError("unroll failure: non-finite prediction at step " +
                         std::to_string(h));
    }
    t.states.push_back(predicted[h].vec());
  }
  return t;
}

double FinalStateError(const PhaseTrajectory& predicted,
                       const PhaseTrajectory& truth,
                       const data::Normalizer& normalizer) {
  if (predicted.states.empty() ||
      predicted.states.size() != truth.states.size()) {
    throw std::invalid_argument("trajectories differ in length");
  }
  const data::Vec zp = normalizer.Normalize(predicted.states.back());
  const data::Vec zt = normalizer.Normalize(truth.states.back());
  double sum = 0.0;
  for (std::size_t i = 0; i < zp.size(); ++i) sum += std::abs(zp[i] - zt[i]);
  return sum / static_cast<double>(zp.size());
}

std::vector<double> VelocitySwings(const PhaseTrajectory& trajectory) {
  std::vector<double> swings;
  double extreme = 0.0;
  int sign = 0;
  for (const auto& s : trajectory.states) {
    const double v = s.at(1);
    const int current = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (current == 0) continue;
    if (sign != 0 && current != sign) {
      swings.push_back(extreme);
      extreme = 0.0;
    }
    sign = current;
    if (std::abs(v) > std::abs(extreme)) extreme = v;
  }
  if (sign != 0) swings.push_back(extreme);
  return swings;
}

std::string PhaseCsv(std::span<const PhaseTrajectory> trajectories) {
  std::size_t dims = 0;
  for (const auto& t : trajectories) {
    if (!t.states.empty()) dims = t.states.front().size();
  }
  std::string out = "label,step";
  for (std::size_t d = 0; d < dims; ++d) out += fmt::format(",s{}", d);
  out += '\n';
  for (const auto& t : trajectories) {
    for (std::size_t h = 0; h < t.states.size(); ++h) {
      out += fmt::format("{},{}", t.label, h);
      for (double v : t.states[h]) out += fmt::format(",{}", v);
      out += '\n';
    }
  }
  return out;
}

std::string PhaseSvg(std::span<const PhaseTrajectory> trajectories,
                     std::span<const data::Vec> training_states,
                     const std::string& title) {
  std::vector<Series> series;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  auto extend = [&](const data::Vec& s) {
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) return;
    x_lo = std::min(x_lo, s[0]);
    x_hi = std::max(x_hi, s[0]);
    y_lo = std::min(y_lo, s[1]);
    y_hi = std::max(y_hi, s[1]);
  };
  for (const auto& t : trajectories) {
    Series s{t.label, {}, {}, {}, false};
    for (const auto& state : t.states) {
      s.x.push_back(state.at(0));
      s.y.push_back(state.at(1));
      extend(state);
    }
    series.push_back(std::move(s));
  }
  std::vector<double> tx, ty;
  for (const auto& s : training_states) {
    tx.push_back(s.at(0));
    ty.push_back(s.at(1));
    extend(s);
  }
  const PlotSpec spec{title, "position", "velocity", 720, 480};
  if (tx.empty() || !(x_hi > x_lo) || !(y_hi > y_lo)) {
    return RenderLinePlot(spec, series);
  }
  const Heatmap density =
      Histogram2d(tx, ty, x_lo, x_hi, y_lo, y_hi, 40, 40);
  return RenderLinePlot(spec, series, &density);
}

}  // namespace dynode::eval
