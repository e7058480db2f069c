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

#include "dynode/envs/environment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dynode/common/errors.h"
#include "dynode/envs/classic.h"

namespace dynode::envs {
namespace {

void RequireFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("environment step: non-finite ") + what);
    }
  }
}

}  // namespace

State Environment::Reset(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  return Reset(rng);
}

StepResult Environment::Step(std::span<const double> state,
                             std::span<const double> action) const {
  const EnvSpec& s = spec();
  if (state.size() != s.state_dim || action.size() != s.action_dim) {
    throw DimensionError(s.name + ": step expects state " +
                         std::to_string(s.state_dim) + " and action " +
                         std::to_string(s.action_dim) + ", got " +
                         std::to_string(state.size()) + " and " +
                         std::to_string(action.size()));
  }
  RequireFinite(state, "state");
  RequireFinite(action, "action");
  std::vector<double> clipped(action.begin(), action.end());
  for (double& a : clipped) a = std::clamp(a, -1.0, 1.0);
  StepResult result;
  result.next_state = Advance(state, clipped);
  RequireFinite(result.next_state, "next state");
  result.reward = Reward(state, clipped, result.next_state);
  result.done = Terminal(result.next_state);
  return result;
}

bool Environment::Terminal(std::span<const double>) const { return false; }

std::vector<double> Environment::Observe(std::span<const double> state) const {
  return {state.begin(), state.end()};
}

std::unique_ptr<ode::DerivativeField> Environment::AnalyticField() const {
  throw std::logic_error(spec().name +
                         " uses a discrete update and has no analytic field");
}

double WrapAngle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double wrapped = std::fmod(angle + kPi, 2 * kPi);
  if (wrapped < 0) wrapped += 2 * kPi;
  return wrapped - kPi;
}

std::vector<std::string> EnvironmentNames() {
  return {"mountaincar", "cartpole-swingup", "cartpole-balance", "pendulum"};
}

std::unique_ptr<Environment> MakeEnvironment(const std::string& name) {
  if (name == "mountaincar") return std::make_unique<MountainCar>();
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "cartpole-swingup") {
    return std::make_unique<CartPole>(CartPole::Task::kSwingup);
  }
  if (name == "cartpole-balance") {
    return std::make_unique<CartPole>(CartPole::Task::kBalance);
  }
  throw std::invalid_argument(
      "unknown environment '" + name +
      "' (expected mountaincar, cartpole-swingup, cartpole-balance or "
      "pendulum)");
}

}  // namespace dynode::envs
