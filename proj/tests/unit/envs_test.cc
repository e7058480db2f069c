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

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "dynode/common/errors.h"
#include "dynode/envs/classic.h"
#include "dynode/envs/constants.h"
#include "dynode/envs/environment.h"

namespace dynode::envs {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(RegistryTest, BuildsEveryNamedEnvironment) {
  for (const std::string& name : EnvironmentNames()) {
    auto env = MakeEnvironment(name);
    EXPECT_EQ(env->spec().name, name);
    EXPECT_GE(env->spec().state_dim, 2u);
    EXPECT_GT(env->spec().dt, 0.0);
  }
  EXPECT_THROW(MakeEnvironment("cheetah-run"), std::invalid_argument);
}

TEST(MountainCarTest, ResetDistribution) {
  MountainCar env;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const State s = env.Reset(seed);
    EXPECT_GE(s[0], -0.6);
    EXPECT_LE(s[0], -0.4);
    EXPECT_EQ(s[1], 0.0);
  }
  EXPECT_EQ(env.Reset(7), env.Reset(7));
}

TEST(MountainCarTest, ClosedFormStep) {
  MountainCar env;
  const State s = {-0.5, 0.0};
  const StepResult r = env.Step(s, std::vector<double>{0.0});
  const double velocity = -0.0025 * std::cos(-1.5);
  EXPECT_DOUBLE_EQ(r.next_state[1], velocity);
  EXPECT_DOUBLE_EQ(r.next_state[0], -0.5 + velocity);
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.reward, 0.0);
}

TEST(MountainCarTest, ActionIsClippedAndCharged) {
  MountainCar env;
  const State s = {-0.5, 0.0};
  const StepResult big = env.Step(s, std::vector<double>{5.0});
  const StepResult one = env.Step(s, std::vector<double>{1.0});
  EXPECT_EQ(big.next_state, one.next_state);
  EXPECT_DOUBLE_EQ(big.reward, -0.1);
}

TEST(MountainCarTest, LeftWallStopsTheCar) {
  MountainCar env;
  const StepResult r = env.Step(State{-1.19, -0.05}, std::vector<double>{-1});
  EXPECT_EQ(r.next_state[0], mountain_car::kMinPosition);
  EXPECT_EQ(r.next_state[1], 0.0);
}

TEST(MountainCarTest, GoalTerminatesWithBonus) {
  MountainCar env;
  const StepResult r = env.Step(State{0.44, 0.05}, std::vector<double>{1.0});
  EXPECT_TRUE(r.done);
  EXPECT_DOUBLE_EQ(r.reward, 100.0 - 0.1);
}

TEST(MountainCarTest, HasNoAnalyticField) {
  MountainCar env;
  EXPECT_FALSE(env.has_analytic_field());
  EXPECT_THROW(env.AnalyticField(), std::logic_error);
}

TEST(PendulumTest, ResetDistribution) {
  Pendulum env;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const State s = env.Reset(seed);
    EXPECT_GE(s[0], -kPi);
    EXPECT_LE(s[0], kPi);
    EXPECT_GE(s[1], -1.0);
    EXPECT_LE(s[1], 1.0);
  }
}

TEST(PendulumTest, HangingAtRestIsAFixedPoint) {
  Pendulum env;
  State s = {kPi, 0.0};
  for (int t = 0; t < 200; ++t) s = env.Step(s, std::vector<double>{0}).next_state;
  // sin(2 pi) is ~2e-16 in floating point, not exactly zero.
  EXPECT_NEAR(s[0], kPi, 1e-10);
  EXPECT_NEAR(s[1], 0.0, 1e-10);
}

TEST(PendulumTest, FieldMatchesDocumentedForm) {
  Pendulum env;
  auto field = env.AnalyticField();
  ad::Tape tape;
  const double theta = 0.3, theta_dot = -0.7, a = 0.4;
  const ad::Tensor d =
      field
          ->Evaluate(tape.Constant(ad::Tensor::Vector({theta, theta_dot})),
                     tape.Constant(ad::Tensor::Vector({a})))
          .value();
  EXPECT_DOUBLE_EQ(d[0], theta_dot);
  EXPECT_NEAR(d[1], -(3 * 10.0 / 2) * std::sin(theta + kPi) + 3.0 * 2.0 * a,
              1e-14);
}

TEST(PendulumTest, UndrivenEnergyIsConserved) {
  // 200 internal RK4 steps (40 environment steps of 5 substeps each).
  Pendulum env;
  State s = {2.0, 0.5};
  const double e0 = Pendulum::Energy(s);
  for (int t = 0; t < 200 / pendulum::kSubsteps; ++t) {
    s = env.Step(s, std::vector<double>{0}).next_state;
  }
  EXPECT_LT(std::abs(Pendulum::Energy(s) - e0) / std::abs(e0), 1e-3);
}

TEST(PendulumTest, RewardUsesWrappedAngle) {
  Pendulum env;
  const std::vector<double> zero = {0.0};
  EXPECT_NEAR(env.Reward(State{2 * kPi, 0}, zero, State{0, 0}), 0.0, 1e-20);
  EXPECT_NEAR(env.Reward(State{kPi - 0.1, 1.0}, std::vector<double>{1.0},
                         State{0, 0}),
              -((kPi - 0.1) * (kPi - 0.1) + 0.1 + 0.004), 1e-12);
}

TEST(CartPoleTest, UprightEquilibriumIsUnstable) {
  CartPole env(CartPole::Task::kBalance);
  State s = {0, 0, 1e-4, 0};
  double previous = std::abs(s[2]);
  for (int t = 0; t < 50; ++t) {
    s = env.Step(s, std::vector<double>{0}).next_state;
    EXPECT_GT(std::abs(s[2]), previous);
    previous = std::abs(s[2]);
  }
  // Linearization about upright: theta(t) = theta0 cosh(lambda t) with
  // lambda^2 = g / (l (4/3 - m_p / M)).
  const double lambda = std::sqrt(9.8 / (0.5 * (4.0 / 3.0 - 0.1 / 1.1)));
  EXPECT_NEAR(previous / (1e-4 * std::cosh(lambda * 50 * 0.02)), 1.0, 1e-2);
}

TEST(CartPoleTest, HangingAtRestHasZeroField) {
  CartPole env(CartPole::Task::kSwingup);
  auto field = env.AnalyticField();
  ad::Tape tape;
  const ad::Tensor d =
      field
          ->Evaluate(tape.Constant(ad::Tensor::Vector({0.3, 0, kPi, 0})),
                     tape.Constant(ad::Tensor::Vector({0})))
          .value();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(d[i], 0.0, 1e-14);
}

TEST(CartPoleTest, ResetDistributions) {
  CartPole swingup(CartPole::Task::kSwingup);
  CartPole balance(CartPole::Task::kBalance);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const State down = swingup.Reset(seed);
    const State up = balance.Reset(seed);
    EXPECT_NEAR(down[2], kPi, 0.05);
    EXPECT_NEAR(up[2], 0.0, 0.05);
    for (int i : {0, 1, 3}) {
      EXPECT_LE(std::abs(down[i]), 0.05);
      EXPECT_LE(std::abs(up[i]), 0.05);
    }
  }
}

TEST(CartPoleTest, Rewards) {
  CartPole swingup(CartPole::Task::kSwingup);
  CartPole balance(CartPole::Task::kBalance);
  const std::vector<double> a = {0.5};
  EXPECT_DOUBLE_EQ(swingup.Reward(State(4), a, State{0, 0, 0, 0}),
                   1.0 - 0.001 * 0.25);
  EXPECT_NEAR(swingup.Reward(State(4), a, State{0, 0, kPi, 0}), -0.00025,
              1e-15);
  EXPECT_EQ(balance.Reward(State(4), a, State{0, 0, 2 * kPi + 0.1, 0}), 1.0);
  EXPECT_EQ(balance.Reward(State(4), a, State{0, 0, 0.3, 0}), 0.0);
}

TEST(CartPoleTest, WallsClipPosition) {
  CartPole env(CartPole::Task::kBalance);
  const StepResult r = env.Step(State{9.99, 5.0, 0, 0}, std::vector<double>{1});
  EXPECT_EQ(r.next_state[0], 10.0);
  EXPECT_EQ(r.next_state[1], 0.0);
}

TEST(AnalyticFieldTest, StepMatchesOdeStepOnField) {
  for (const char* name : {"pendulum", "cartpole-swingup", "cartpole-balance"}) {
    auto env = MakeEnvironment(name);
    auto field = env->AnalyticField();
    const ode::SolverConfig config{ode::Method::kRk4, env->spec().substeps,
                                   env->spec().dt};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    State s = env->Reset(rng);
    for (int t = 0; t < 50; ++t) {
      const std::vector<double> a = {u(rng)};
      ad::Tape tape;
      const ad::Tensor expected =
          ode::OdeStep(*field, tape.Constant(ad::Tensor::Vector(s)),
                       tape.Constant(ad::Tensor::Vector(a)), config)
              .value();
      const State next = env->Step(s, a).next_state;
      for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(next[i], expected[i], 1e-10) << name << " t=" << t;
      }
      s = next;
    }
  }
}

TEST(AnalyticFieldTest, BatchedEvaluationMatchesRows) {
  CartPole env(CartPole::Task::kSwingup);
  auto field = env.AnalyticField();
  ad::Tape tape;
  const ad::Tensor states =
      ad::Tensor::Matrix(2, 4, {0.1, -0.2, 0.5, 1.0, -0.3, 0.4, 2.5, -1.5});
  const ad::Tensor actions = ad::Tensor::Matrix(2, 1, {0.3, -0.9});
  const ad::Tensor d =
      field->Evaluate(tape.Constant(states), tape.Constant(actions)).value();
  for (std::size_t r = 0; r < 2; ++r) {
    std::vector<double> plain(4);
    CartPole::PlainDerivative(states.Row(r), actions.Row(r), plain);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(d.at(r, i), plain[i], 1e-14);
  }
}

TEST(DeterminismTest, SameSeedAndActionsGiveIdenticalTrajectories) {
  for (const std::string& name : EnvironmentNames()) {
    auto env = MakeEnvironment(name);
    auto run = [&] {
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> u(-1, 1);
      State s = env->Reset(rng);
      std::vector<double> trace;
      for (int t = 0; t < 100; ++t) {
        const StepResult r = env->Step(s, std::vector<double>{u(rng)});
        trace.insert(trace.end(), r.next_state.begin(), r.next_state.end());
        trace.push_back(r.reward);
        s = r.next_state;
      }
      return trace;
    };
    EXPECT_EQ(run(), run()) << name;
  }
}

TEST(BoundsTest, RandomRolloutsStayInRange) {
  for (const std::string& name : EnvironmentNames()) {
    auto env = MakeEnvironment(name);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    State s = env->Reset(rng);
    for (int t = 0; t < 500; ++t) {
      s = env->Step(s, std::vector<double>{u(rng)}).next_state;
      for (double v : s) ASSERT_TRUE(std::isfinite(v));
      if (name == "mountaincar") {
        ASSERT_GE(s[0], -1.2);
        ASSERT_LE(s[0], 0.6);
        ASSERT_LE(std::abs(s[1]), 0.07);
      } else if (name == "pendulum") {
        ASSERT_LE(std::abs(s[1]), 8.0);
      } else {
        ASSERT_LE(std::abs(s[0]), 10.0);
      }
    }
  }
}

TEST(StepTest, RejectsBadInput) {
  Pendulum env;
  EXPECT_THROW(env.Step(State{0.0}, std::vector<double>{0}), DimensionError);
  EXPECT_THROW(env.Step(State{NAN, 0.0}, std::vector<double>{0}), NumericError);
}

TEST(ObserveTest, AnglesBecomeCosSin) {
  Pendulum pendulum;
  const auto obs = pendulum.Observe(State{0.0, 2.0});
  EXPECT_EQ(obs, (std::vector<double>{1.0, 0.0, 2.0}));
  CartPole cart(CartPole::Task::kSwingup);
  EXPECT_EQ(cart.Observe(State{1, 2, 0, 3}).size(), 5u);
  EXPECT_DOUBLE_EQ(WrapAngle(3 * kPi + 0.1), -kPi + 0.1);
}

}  // namespace
}  // namespace dynode::envs
