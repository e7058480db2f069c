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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynode/envs/classic.h"
#include "dynode/envs/constants.h"

namespace dynode::envs {

namespace pd = pendulum;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGravityGain = 3 * pd::kGravity / (2 * pd::kLength);
constexpr double kTorqueGain = 3 / (pd::kMass * pd::kLength * pd::kLength);

ode::SolverConfig InternalSolver() {
  return {ode::Method::kRk4, pd::kSubsteps, pd::kDt};
}

class PendulumField : public ode::DerivativeField {
 public:
  std::size_t state_dim() const override { return 2; }
  std::size_t action_dim() const override { return 1; }
  ad::Var Evaluate(ad::Var state, ad::Var action) const override {
    ad::Var theta = ad::SliceCols(state, 0, 1);
    ad::Var theta_dot = ad::SliceCols(state, 1, 1);
    ad::Var torque = ad::Scale(ad::Clamp(action, -1, 1), pd::kMaxTorque);
    ad::Var accel =
        ad::Add(ad::Scale(ad::Sin(ad::AddScalar(theta, kPi)), -kGravityGain),
                ad::Scale(torque, kTorqueGain));
    return ad::ConcatCols(theta_dot, accel);
  }
};

}  // namespace

Pendulum::Pendulum()
    : spec_{"pendulum", 2, 1, 3, pd::kDt, pd::kSubsteps, pd::kMaxSteps} {}

State Pendulum::Reset(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> speed(-pd::kResetSpeed,
                                               pd::kResetSpeed);
  const double theta = angle(rng);
  return {theta, speed(rng)};
}

void Pendulum::PlainDerivative(std::span<const double> state,
                               std::span<const double> action,
                               std::span<double> derivative) {
  const double torque = pd::kMaxTorque * std::clamp(action[0], -1.0, 1.0);
  derivative[0] = state[1];
  derivative[1] =
      -kGravityGain * std::sin(state[0] + kPi) + kTorqueGain * torque;
}

double Pendulum::Energy(std::span<const double> state) {
  return 0.5 * state[1] * state[1] + kGravityGain * std::cos(state[0]);
}

State Pendulum::Advance(std::span<const double> state,
                        std::span<const double> action) const {
  State next = ode::IntegratePlain(&Pendulum::PlainDerivative, state, action,
                                   InternalSolver());
  next[1] = std::clamp(next[1], -pd::kMaxSpeed, pd::kMaxSpeed);
  return next;
}

double Pendulum::Reward(std::span<const double> state,
                        std::span<const double> action,
                        std::span<const double>) const {
  const double theta = WrapAngle(state[0]);
  const double torque = pd::kMaxTorque * action[0];
  return -(theta * theta + pd::kSpeedCost * state[1] * state[1] +
           pd::kTorqueCost * torque * torque);
}

std::vector<double> Pendulum::Observe(std::span<const double> state) const {
  return {std::cos(state[0]), std::sin(state[0]), state[1]};
}

std::unique_ptr<ode::DerivativeField> Pendulum::AnalyticField() const {
  return std::make_unique<PendulumField>();
}

}  // namespace dynode::envs
