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

// Open-loop reconstruction of a long controlled trajectory in the
// (position, velocity) phase plane.

#ifndef DYNODE_EVAL_PHASE_SPACE_H_
#define DYNODE_EVAL_PHASE_SPACE_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dynode/data/normalizer.h"
#include "dynode/data/replay.h"
#include "dynode/envs/environment.h"
#include "dynode/eval/metrics.h"

namespace dynode::eval {

// Energy pumping for a car in a valley: full throttle in the direction of
// motion (a = +1 when velocity >= 0, else -1). Runs from `start` until a
// terminal state or max_steps; states[h] is the true state after action h.
data::Rollout EnergyPumpingRollout(const envs::Environment& env,
                                   const data::Vec& start,
                                   std::size_t max_steps);

struct PhaseTrajectory {
  std::string label;
  std::vector<data::Vec> states;  // start state first, then one per action
};

// Ground truth of a rollout as a trajectory (start included).
PhaseTrajectory TruthTrajectory(const data::Rollout& rollout);

// Open-loop prediction of the whole rollout from its start state. Throws
// NumericError ("unroll failure: ...") if the predictor diverges.
PhaseTrajectory ReconstructTrajectory(const Predictor& predictor,
                                      const data::Rollout& rollout,
                                      std::string label);

// Mean absolute normalized difference between the final states.
double FinalStateError(const PhaseTrajectory& predicted,
                       const PhaseTrajectory& truth,
                       const data::Normalizer& normalizer);

// Velocity extremes between successive sign changes of velocity
// (state dimension 1), in time order.
std::vector<double> VelocitySwings(const PhaseTrajectory& trajectory);

// Columns: label, step, then one column per state dimension.
std::string PhaseCsv(std::span<const PhaseTrajectory> trajectories);

// Phase plot of dimension 0 (x) against dimension 1 (y) with the density of
// `training_states` drawn underneath.
std::string PhaseSvg(std::span<const PhaseTrajectory> trajectories,
                     std::span<const data::Vec> training_states,
                     const std::string& title);

}  // namespace dynode::eval

#endif  // DYNODE_EVAL_PHASE_SPACE_H_
