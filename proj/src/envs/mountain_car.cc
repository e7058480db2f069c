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

#include "dynode/envs/classic.h"
#include "dynode/envs/constants.h"

namespace dynode::envs {

namespace mc = mountain_car;

MountainCar::MountainCar()
    : spec_{"mountaincar", 2, 1, 2, mc::kDt, 1, mc::kMaxSteps} {}

State MountainCar::Reset(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> position(mc::kResetLow,
                                                  mc::kResetHigh);
  return {position(rng), 0.0};
}

State MountainCar::Advance(std::span<const double> state,
                           std::span<const double> action) const {
  double position = state[0];
  double velocity = state[1];
  velocity += action[0] * mc::kPower - mc::kGravity * std::cos(3 * position);
  velocity = std::clamp(velocity, -mc::kMaxSpeed, mc::kMaxSpeed);
  position += velocity;
  position = std::clamp(position, mc::kMinPosition, mc::kMaxPosition);
  if (position == mc::kMinPosition && velocity < 0) velocity = 0;
  return {position, velocity};
}

bool MountainCar::Terminal(std::span<const double> state) const {
  return state[0] >= mc::kGoalPosition && state[1] >= mc::kGoalVelocity;
}

double MountainCar::Reward(std::span<const double>,
                           std::span<const double> action,
                           std::span<const double> next_state) const {
  const double bonus = Terminal(next_state) ? mc::kGoalReward : 0.0;
  return bonus - mc::kActionCost * action[0] * action[0];
}

}  // namespace dynode::envs
