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

// Pinned physical constants for the built-in environments.
//
// These follow the widely used public definitions of each task. Bump
// kConstantsVersion whenever any value changes; it is written into dataset
// manifests so stale data can be detected.

#ifndef DYNODE_ENVS_CONSTANTS_H_
#define DYNODE_ENVS_CONSTANTS_H_

namespace dynode::envs {

inline constexpr int kConstantsVersion = 1;

namespace mountain_car {
inline constexpr double kPower = 0.0015;
inline constexpr double kGravity = 0.0025;  // coefficient of cos(3x)
inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.45;
inline constexpr double kGoalVelocity = 0.0;
inline constexpr double kGoalReward = 100.0;
inline constexpr double kActionCost = 0.1;
inline constexpr double kResetLow = -0.6;
inline constexpr double kResetHigh = -0.4;
inline constexpr double kDt = 1.0;  // one discrete update per step
inline constexpr int kMaxSteps = 999;
}  // namespace mountain_car

namespace pendulum {
inline constexpr double kGravity = 10.0;
inline constexpr double kMass = 1.0;
inline constexpr double kLength = 1.0;
inline constexpr double kMaxTorque = 2.0;
inline constexpr double kMaxSpeed = 8.0;
inline constexpr double kDt = 0.05;
inline constexpr int kSubsteps = 5;
inline constexpr double kSpeedCost = 0.1;
inline constexpr double kTorqueCost = 0.001;
inline constexpr double kResetSpeed = 1.0;
inline constexpr int kMaxSteps = 200;
}  // namespace pendulum

namespace cart_pole {
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kHalfLength = 0.5;
inline constexpr double kForceScale = 10.0;
inline constexpr double kTrackLimit = 10.0;  // inelastic walls at +-limit
inline constexpr double kDt = 0.02;
inline constexpr int kSubsteps = 4;
inline constexpr double kResetNoise = 0.05;
inline constexpr double kBalanceThreshold = 0.2;  // radians from upright
inline constexpr double kSwingupActionCost = 0.001;
inline constexpr int kMaxSteps = 200;
}  // namespace cart_pole

}  // namespace dynode::envs

#endif  // DYNODE_ENVS_CONSTANTS_H_
