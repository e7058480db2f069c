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

// Fixed-step explicit integrators for controlled vector fields ds/dt = f(s, a).
//
// The action is held constant over each environment step (zero-order hold):
// one action is consumed per OdeStep call, and the step of length dt is split
// into `substeps` equal solver steps. Gradients come from backpropagating
// through the recorded solver arithmetic.

#ifndef DYNODE_ODE_SOLVER_H_
#define DYNODE_ODE_SOLVER_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dynode/autodiff/tape.h"
#include "dynode/autodiff/tensor.h"

namespace dynode::ode {

enum class Method { kEuler, kRk4 };

std::string MethodName(Method method);
// Accepts "euler" or "rk4"; throws std::invalid_argument otherwise.
Method ParseMethod(const std::string& name);

struct SolverConfig {
  Method method = Method::kRk4;
  int substeps = 1;  // solver evaluations per environment step
  double dt = 1.0;   // seconds per environment step

  double substep_size() const { return dt / substeps; }
  // Throws std::invalid_argument unless substeps >= 1 and dt > 0.
  void Validate() const;

  bool operator==(const SolverConfig&) const = default;
};

// Time-autonomous controlled vector field evaluated on batches:
// state [B x state_dim], action [B x action_dim] -> derivative [B x state_dim].
class DerivativeField {
 public:
  virtual ~DerivativeField() = default;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual ad::Var Evaluate(ad::Var state, ad::Var action) const = 0;
};

class LambdaField : public DerivativeField {
 public:
  using Fn = std::function<ad::Var(ad::Var, ad::Var)>;
  LambdaField(std::size_t state_dim, std::size_t action_dim, Fn fn)
      : state_dim_(state_dim), action_dim_(action_dim), fn_(std::move(fn)) {}

  std::size_t state_dim() const override { return state_dim_; }
  std::size_t action_dim() const override { return action_dim_; }
  ad::Var Evaluate(ad::Var state, ad::Var action) const override {
    return fn_(state, action);
  }

 private:
  std::size_t state_dim_;
  std::size_t action_dim_;
  Fn fn_;
};

// Advances one environment step. Throws DimensionError on shape mismatch and
// NumericError (naming the substep) if the state becomes non-finite.
ad::Var OdeStep(const DerivativeField& field, ad::Var state, ad::Var action,
                const SolverConfig& config);

// Open-loop composition: each step consumes the previous prediction.
// Returns the H predicted successor states. NumericError messages carry the
// failing horizon index.
std::vector<ad::Var> Unroll(const DerivativeField& field, ad::Var start,
                            std::span<const ad::Var> actions,
                            const SolverConfig& config);

struct ConvergenceStudy {
  std::vector<double> step_sizes;
  std::vector<double> errors;  // max-norm global error at final_time
  double order = 0.0;          // least-squares slope of log error vs log h
};

// Integrates from 0 to final_time with each substep count in `substeps`
// (one OdeStep of dt = final_time) and fits the log-log slope against the
// exact solution at final_time.
ConvergenceStudy EstimateOrder(const DerivativeField& field,
                               const ad::Tensor& start,
                               const ad::Tensor& action, double final_time,
                               const ad::Tensor& exact_final, Method method,
                               std::span<const int> substeps);

// Non-differentiable counterpart on plain vectors, used by simulators.
using PlainField = std::function<void(std::span<const double> state,
                                      std::span<const double> action,
                                      std::span<double> derivative)>;

std::vector<double> IntegratePlain(const PlainField& field,
                                   std::span<const double> state,
                                   std::span<const double> action,
                                   const SolverConfig& config);

}  // namespace dynode::ode

#endif  // DYNODE_ODE_SOLVER_H_
