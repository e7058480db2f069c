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

// Deterministic continuous-control environments with known dynamics.
//
// Environments are stateless value objects: the caller owns the state vector
// and passes it to Step(). Actions live in [-1, 1]^action_dim and are clipped
// before use; each environment scales them to its physical units.

#ifndef DYNODE_ENVS_ENVIRONMENT_H_
#define DYNODE_ENVS_ENVIRONMENT_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dynode/ode/solver.h"

namespace dynode::envs {

using State = std::vector<double>;

struct EnvSpec {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t observation_dim = 0;
  double dt = 0.0;
  int substeps = 1;  // internal integrator steps per environment step
  int max_steps = 0;
};

struct StepResult {
  State next_state;
  double reward = 0.0;
  bool done = false;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  // Draws from the documented initial-state distribution.
  virtual State Reset(std::mt19937_64& rng) const = 0;
  State Reset(std::uint64_t seed) const;

  // Clips the action into [-1, 1], advances one step and scores it.
  // Throws DimensionError on bad sizes and NumericError on non-finite input
  // or output.
  StepResult Step(std::span<const double> state,
                  std::span<const double> action) const;

  // Reward for a transition; `action` is already clipped. Also used to score
  // model-imagined transitions.
  virtual double Reward(std::span<const double> state,
                        std::span<const double> action,
                        std::span<const double> next_state) const = 0;

  // True if `state` ends the episode (goal reached).
  virtual bool Terminal(std::span<const double> state) const;

  // Policy input features (e.g. angles as cos/sin).
  virtual std::vector<double> Observe(std::span<const double> state) const;

  // Continuous-time dynamics ds/dt on the tape, taking unclipped actions.
  // Throws std::logic_error for environments without an ODE form.
  virtual bool has_analytic_field() const { return false; }
  virtual std::unique_ptr<ode::DerivativeField> AnalyticField() const;

 protected:
  // One step of dynamics with a clipped action.
  virtual State Advance(std::span<const double> state,
                        std::span<const double> action) const = 0;
};

// Wraps an angle into [-pi, pi).
double WrapAngle(double angle);

// Registry names: mountaincar, cartpole-swingup, cartpole-balance, pendulum.
std::vector<std::string> EnvironmentNames();
// Throws std::invalid_argument for unknown names.
std::unique_ptr<Environment> MakeEnvironment(const std::string& name);

}  // namespace dynode::envs

#endif  // DYNODE_ENVS_ENVIRONMENT_H_
