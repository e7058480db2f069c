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

#include "dynode/ode/solver.h"

#include <cmath>
#include <stdexcept>

#include "dynode/common/errors.h"

namespace dynode::ode {

using ad::Tensor;
using ad::Var;

std::string MethodName(Method method) {
  return method == Method::kEuler ? "euler" : "rk4";
}

Method ParseMethod(const std::string& name) {
  if (name == "euler") return Method::kEuler;
  if (name == "rk4") return Method::kRk4;
  throw std::invalid_argument("unknown solver method '" + name +
                              "' (expected euler or rk4)");
}

void SolverConfig::Validate() const {
  if (substeps < 1) throw std::invalid_argument("solver substeps must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("solver dt must be > 0");
}

namespace {

Var EvaluateChecked(const DerivativeField& field, Var state, Var action) {
  Var derivative = field.Evaluate(state, action);
  const Tensor& d = derivative.value();
  const Tensor& s = state.value();
  if (d.rows() != s.rows() || d.cols() != s.cols()) {
    throw DimensionError("derivative field returned " +
                         derivative.value().ShapeString() + " for state " +
                         state.value().ShapeString());
  }
  return derivative;
}

Var EulerSubstep(const DerivativeField& field, Var s, Var a, double h) {
  return Add(s, Scale(EvaluateChecked(field, s, a), h));
}

// Classical fourth-order Runge-Kutta with the action frozen over the substep.
Var Rk4Substep(const DerivativeField& field, Var s, Var a, double h) {
  Var k1 = EvaluateChecked(field, s, a);
  Var k2 = EvaluateChecked(field, Add(s, Scale(k1, h / 2)), a);
  Var k3 = EvaluateChecked(field, Add(s, Scale(k2, h / 2)), a);
  Var k4 = EvaluateChecked(field, Add(s, Scale(k3, h)), a);
  Var sum = Add(Add(k1, Scale(k2, 2.0)), Add(Scale(k3, 2.0), k4));
  return Add(s, Scale(sum, h / 6));
}

}  // namespace

Var OdeStep(const DerivativeField& field, Var state, Var action,
            const SolverConfig& config) {
  config.Validate();
  const Tensor& s = state.value();
  const Tensor& a = action.value();
  if (s.cols() != field.state_dim() || a.cols() != field.action_dim() ||
      s.rows() != a.rows()) {
    throw DimensionError("ode_step: state " + s.ShapeString() + ", action " +
                         a.ShapeString() + " for field of dims " +
                         std::to_string(field.state_dim()) + "/" +
                         std::to_string(field.action_dim()));
  }
  const double h = config.substep_size();
  Var current = state;
  for (int k = 0; k < config.substeps; ++k) {
    try {
      current = config.method == Method::kEuler
                    ? EulerSubstep(field, current, action, h)
                    : Rk4Substep(field, current, action, h);
    } catch (const NumericError& e) {
      throw NumericError("ode_step substep " + std::to_string(k) + ": " +
                         e.what());
    }
  }
  return current;
}

std::vector<Var> Unroll(const DerivativeField& field, Var start,
                        std::span<const Var> actions,
                        const SolverConfig& config) {
  if (actions.empty()) throw std::invalid_argument("unroll needs H >= 1");
  std::vector<Var> states;
  states.reserve(actions.size());
  Var current = start;
  for (std::size_t h = 0; h < actions.size(); ++h) {
    try {
      current = OdeStep(field, current, actions[h], config);
    } catch (const NumericError& e) {
      throw NumericError("unroll horizon " + std::to_string(h) + ": " +
                         e.what());
    }
    states.push_back(current);
  }
  return states;
}

ConvergenceStudy EstimateOrder(const DerivativeField& field,
                               const Tensor& start, const Tensor& action,
                               double final_time, const Tensor& exact_final,
                               Method method, std::span<const int> substeps) {
  if (substeps.size() < 2) {
    throw std::invalid_argument("order estimate needs two or more resolutions");
  }
  ConvergenceStudy study;
  for (int m : substeps) {
    ad::Tape tape;
    const SolverConfig config{method, m, final_time};
    const Tensor end =
        OdeStep(field, tape.Constant(start), tape.Constant(action), config)
            .value();
    double error = 0.0;
    for (std::size_t i = 0; i < end.size(); ++i) {
      error = std::max(error, std::abs(end[i] - exact_final[i]));
    }
    study.step_sizes.push_back(config.substep_size());
    study.errors.push_back(error);
  }
  // Least-squares slope of log(error) on log(h).
  const double n = static_cast<double>(substeps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < study.errors.size(); ++i) {
    const double x = std::log(study.step_sizes[i]);
    const double y = std::log(study.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  study.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

std::vector<double> IntegratePlain(const PlainField& field,
                                   std::span<const double> state,
                                   std::span<const double> action,
                                   const SolverConfig& config) {
  config.Validate();
  const std::size_t n = state.size();
  const double h = config.substep_size();
  std::vector<double> s(state.begin(), state.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int step = 0; step < config.substeps; ++step) {
    field(s, action, k1);
    if (config.method == Method::kEuler) {
      for (std::size_t i = 0; i < n; ++i) s[i] += h * k1[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h / 2 * k1[i];
      field(tmp, action, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h / 2 * k2[i];
      field(tmp, action, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * k3[i];
      field(tmp, action, k4);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] += h / 6 * ((k1[i] + 2.0 * k2[i]) + (2.0 * k3[i] + k4[i]));
      }
    }
    for (double v : s) {
      if (!std::isfinite(v)) {
        throw NumericError("integrator produced a non-finite state at substep " +
                           std::to_string(step));
      }
    }
  }
  return s;
}

}  // namespace dynode::ode
