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

namespace cp = cart_pole;

namespace {

constexpr double kTotalMass = cp::kCartMass + cp::kPoleMass;
constexpr double kPoleMassLength = cp::kPoleMass * cp::kHalfLength;

ode::SolverConfig InternalSolver() {
  return {ode::Method::kRk4, cp::kSubsteps, cp::kDt};
}

// Frictionless cart-pole equations of motion with theta = 0 upright:
//   temp   = (F + m_p l w^2 sin) / M
//   w_dot  = (g sin - cos temp) / (l (4/3 - m_p cos^2 / M))
//   v_dot  = temp - m_p l w_dot cos / M
class CartPoleField : public ode::DerivativeField {
 public:
  std::size_t state_dim() const override { return 4; }
  std::size_t action_dim() const override { return 1; }
  ad::Var Evaluate(ad::Var state, ad::Var action) const override {
    ad::Var x_dot = ad::SliceCols(state, 1, 1);
    ad::Var theta = ad::SliceCols(state, 2, 1);
    ad::Var theta_dot = ad::SliceCols(state, 3, 1);
    ad::Var force = ad::Scale(ad::Clamp(action, -1, 1), cp::kForceScale);
    ad::Var sin = ad::Sin(theta);
    ad::Var cos = ad::Cos(theta);
    ad::Var temp = ad::Scale(
        ad::Add(force, ad::Scale(ad::Mul(ad::Square(theta_dot), sin),
                                 kPoleMassLength)),
        1 / kTotalMass);
    ad::Var numerator =
        ad::Sub(ad::Scale(sin, cp::kGravity), ad::Mul(cos, temp));
    ad::Var denominator = ad::AddScalar(
        ad::Scale(ad::Square(cos), -kPoleMassLength / kTotalMass),
        cp::kHalfLength * 4.0 / 3.0);
    ad::Var theta_acc = ad::Div(numerator, denominator);
    ad::Var x_acc = ad::Sub(
        temp, ad::Scale(ad::Mul(theta_acc, cos), kPoleMassLength / kTotalMass));
    return ad::ConcatCols(ad::ConcatCols(x_dot, x_acc),
                          ad::ConcatCols(theta_dot, theta_acc));
  }
};

}  // namespace

CartPole::CartPole(Task task)
    : task_(task),
      spec_{task == Task::kSwingup ? "cartpole-swingup" : "cartpole-balance",
            4,
            1,
            5,
            cp::kDt,
            cp::kSubsteps,
            cp::kMaxSteps} {}

State CartPole::Reset(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> noise(-cp::kResetNoise,
                                               cp::kResetNoise);
  State s(4);
  for (double& v : s) v = noise(rng);
  if (task_ == Task::kSwingup) s[2] += std::numbers::pi;
  return s;
}

void CartPole::PlainDerivative(std::span<const double> state,
                               std::span<const double> action,
                               std::span<double> derivative) {
  const double force = cp::kForceScale * std::clamp(action[0], -1.0, 1.0);
  const double theta_dot = state[3];
  const double sin = std::sin(state[2]);
  const double cos = std::cos(state[2]);
  const double temp =
      (force + kPoleMassLength * (theta_dot * theta_dot * sin)) *
      (1 / kTotalMass);
  const double numerator = cp::kGravity * sin - cos * temp;
  const double denominator = (-kPoleMassLength / kTotalMass) * (cos * cos) +
                             cp::kHalfLength * 4.0 / 3.0;
  const double theta_acc = numerator / denominator;
  derivative[0] = state[1];
  derivative[1] = temp - (kPoleMassLength / kTotalMass) * (theta_acc * cos);
  derivative[2] = theta_dot;
  derivative[3] = theta_acc;
}

State CartPole::Advance(std::span<const double> state,
                        std::span<const double> action) const {
  State next = ode::IntegratePlain(&CartPole::PlainDerivative, state, action,
                                   InternalSolver());
  // Inelastic walls at the ends of the track.
  if (next[0] > cp::kTrackLimit || next[0] < -cp::kTrackLimit) {
    next[0] = std::clamp(next[0], -cp::kTrackLimit, cp::kTrackLimit);
    next[1] = 0.0;
  }
  return next;
}

double CartPole::Reward(std::span<const double>,
                        std::span<const double> action,
                        std::span<const double> next_state) const {
  if (task_ == Task::kBalance) {
    return std::abs(WrapAngle(next_state[2])) < cp::kBalanceThreshold ? 1.0
                                                                      : 0.0;
  }
  return 0.5 * (1 + std::cos(next_state[2])) -
         cp::kSwingupActionCost * action[0] * action[0];
}

std::vector<double> CartPole::Observe(std::span<const double> state) const {
  return {state[0], state[1], std::cos(state[2]), std::sin(state[2]),
          state[3]};
}

std::unique_ptr<ode::DerivativeField> CartPole::AnalyticField() const {
  return std::make_unique<CartPoleField>();
}

}  // namespace dynode::envs
