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

// The built-in environments. States:
//   MountainCar: (position, velocity)
//   Pendulum:    (theta, theta_dot), theta = 0 upright, unwrapped
//   CartPole:    (x, x_dot, theta, theta_dot), theta = 0 upright, unwrapped

#ifndef DYNODE_ENVS_CLASSIC_H_
#define DYNODE_ENVS_CLASSIC_H_

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "dynode/envs/environment.h"
#include "dynode/ode/solver.h"

namespace dynode::envs {

// Discrete closed-form update; deliberately not an ODE.
class MountainCar : public Environment {
 public:
  MountainCar();
  const EnvSpec& spec() const override { return spec_; }
  State Reset(std::mt19937_64& rng) const override;
  using Environment::Reset;
  double Reward(std::span<const double> state, std::span<const double> action,
                std::span<const double> next_state) const override;
  bool Terminal(std::span<const double> state) const override;

 protected:
  State Advance(std::span<const double> state,
                std::span<const double> action) const override;

 private:
  EnvSpec spec_;
};

class Pendulum : public Environment {
 public:
  Pendulum();
  const EnvSpec& spec() const override { return spec_; }
  State Reset(std::mt19937_64& rng) const override;
  using Environment::Reset;
  double Reward(std::span<const double> state, std::span<const double> action,
                std::span<const double> next_state) const override;
  std::vector<double> Observe(std::span<const double> state) const override;
  bool has_analytic_field() const override { return true; }
  std::unique_ptr<ode::DerivativeField> AnalyticField() const override;

  // Same field on plain vectors (clips the action).
  static void PlainDerivative(std::span<const double> state,
                              std::span<const double> action,
                              std::span<double> derivative);
  // Undriven conserved quantity: 0.5 theta_dot^2 + (3g / 2l) cos(theta).
  static double Energy(std::span<const double> state);

 protected:
  State Advance(std::span<const double> state,
                std::span<const double> action) const override;

 private:
  EnvSpec spec_;
};

// Frictionless cart-pole. Swing-up and balance share dynamics and differ in
// the initial distribution and reward.
class CartPole : public Environment {
 public:
  enum class Task { kSwingup, kBalance };

  explicit CartPole(Task task);
  const EnvSpec& spec() const override { return spec_; }
  Task task() const { return task_; }
  State Reset(std::mt19937_64& rng) const override;
  using Environment::Reset;
  double Reward(std::span<const double> state, std::span<const double> action,
                std::span<const double> next_state) const override;
  std::vector<double> Observe(std::span<const double> state) const override;
  bool has_analytic_field() const override { return true; }
  std::unique_ptr<ode::DerivativeField> AnalyticField() const override;

  static void PlainDerivative(std::span<const double> state,
                              std::span<const double> action,
                              std::span<double> derivative);

 protected:
  State Advance(std::span<const double> state,
                std::span<const double> action) const override;

 private:
  Task task_;
  EnvSpec spec_;
};

}  // namespace dynode::envs

#endif  // DYNODE_ENVS_CLASSIC_H_
