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
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dynode/common/errors.h"
#include "dynode/data/collect.h"
#include "dynode/envs/classic.h"
#include "dynode/models/dynamics_model.h"
#include "dynode/models/train.h"

namespace dynode::models {
namespace {

using ad::Tape;
using ad::Tensor;
using ad::Var;

ModelConfig SmallConfig(ModelKind kind, double dt = 0.1, int substeps = 1) {
  ModelConfig c;
  c.kind = kind;
  c.hidden = {16, 16};
  c.dt = dt;
  c.substeps = substeps;
  return c;
}

// Randomizes every parameter, including the zero-initialized last layer.
void Randomize(ad::MlpParams& params, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Tensor* t : params.Tensors()) {
    for (double& v : t->data()) v = u(rng);
  }
}

TEST(ModelKindTest, NamesRoundTrip) {
  for (ModelKind k :
       {ModelKind::kBaseline, ModelKind::kDynodeEuler, ModelKind::kDynodeRk4}) {
    EXPECT_EQ(ParseModelKind(ModelKindName(k)), k);
  }
  EXPECT_THROW(ParseModelKind("gru"), std::invalid_argument);
}

TEST(PredictNextTest, ZeroInitializedModelIsIdentity) {
  std::mt19937_64 rng(1);
  const Tensor s = Tensor::Matrix(2, 3, {0.1, -2, 3, 4, 5.5, -6});
  const Tensor a = Tensor::Matrix(2, 1, {0.3, -0.7});
  for (ModelKind k :
       {ModelKind::kBaseline, ModelKind::kDynodeEuler, ModelKind::kDynodeRk4}) {
    DynamicsModel model(SmallConfig(k), 3, 1, rng);
    EXPECT_EQ(model.PredictNext(s, a), s) << ModelKindName(k);
    model.set_normalizer(data::Normalizer({1, 2, 3}, {0.5, 2, 4}));
    const Tensor next = model.PredictNext(s, a);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(next[i], s[i], 1e-12);
  }
}

TEST(PredictNextTest, AnalyticFieldSubstitutionMatchesEnvironment) {
  envs::Pendulum env;
  auto raw = env.AnalyticField();
  const data::Normalizer norm({0.5, -1.0}, {1.7, 2.5});
  NormalizedField field(*raw, norm);
  std::mt19937_64 rng(2);
  DynamicsModel rk4(SmallConfig(ModelKind::kDynodeRk4, env.spec().dt,
                                env.spec().substeps),
                    2, 1, rng);
  DynamicsModel euler(SmallConfig(ModelKind::kDynodeEuler, env.spec().dt, 1), 2,
                      1, rng);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_rk4 = 0.0, worst_euler = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> s = {3 * u(rng), 2 * u(rng)};
    const std::vector<double> a = {u(rng)};
    const auto truth = env.Step(s, a).next_state;
    for (DynamicsModel* model : {&rk4, &euler}) {
      Tape tape;
      const Tensor z = tape.Constant(norm.Normalize(Tensor::Matrix(1, 2, s)))
                           .value();
      const Tensor next = norm.Denormalize(
          model->StepWithField(field, tape.Constant(z),
                               tape.Constant(Tensor::Matrix(1, 1, a)))
              .value());
      double& worst = model == &rk4 ? worst_rk4 : worst_euler;
      for (int i = 0; i < 2; ++i) {
        worst = std::max(worst, std::abs(next[i] - truth[i]));
      }
    }
  }
  // RK4 with the environment's own substeps reproduces it up to rounding;
  // one Euler step carries O(dt^2) local error.
  EXPECT_LT(worst_rk4, 1e-10);
  EXPECT_LT(worst_euler, 0.05);
  EXPECT_GT(worst_euler, 1e-4);
}

TEST(PredictNextTest, BaselineHasNoField) {
  std::mt19937_64 rng(0);
  DynamicsModel model(SmallConfig(ModelKind::kBaseline), 2, 1, rng);
  envs::Pendulum env;
  auto field = env.AnalyticField();
  Tape tape;
  EXPECT_THROW(model.StepWithField(*field, tape.Constant(Tensor::Zeros(1, 2)),
                                   tape.Constant(Tensor::Zeros(1, 1))),
               std::logic_error);
}

TEST(EquivalenceTest, BaselineMatchesEulerWhenDeltaIsFieldTimesDt) {
  std::mt19937_64 rng(3);
  const double dt = 0.05;
  DynamicsModel euler(SmallConfig(ModelKind::kDynodeEuler, dt, 1), 3, 2, rng);
  Randomize(euler.mutable_net(), rng, 0.5);
  ad::MlpParams delta = euler.net();
  delta.layers.back().weight = Tensor(delta.layers.back().weight);
  for (double& v : delta.layers.back().weight.data()) v *= dt;
  for (double& v : delta.layers.back().bias.data()) v *= dt;
  const data::Normalizer norm({0.1, 0.2, 0.3}, {1.5, 0.5, 2.0});
  euler.set_normalizer(norm);
  DynamicsModel baseline(ModelKind::kBaseline, delta, norm, euler.solver());
  std::uniform_real_distribution<double> u(-2, 2);
  Tensor s = Tensor::Zeros(8, 3), a = Tensor::Zeros(8, 2);
  for (double& v : s.data()) v = u(rng);
  for (double& v : a.data()) v = u(rng) / 2;
  const Tensor p1 = euler.PredictNext(s, a);
  const Tensor p2 = baseline.PredictNext(s, a);
  for (std::size_t i = 0; i < p1.size(); ++i) EXPECT_NEAR(p1[i], p2[i], 1e-12);
}

TEST(PathLossTest, HandComputedTwoDimHorizonTwo) {
  Tape tape;
  const std::vector<Var> predictions = {
      tape.Constant(Tensor::Matrix(1, 2, {1, 2})),
      tape.Constant(Tensor::Matrix(1, 2, {3, 4}))};
  const std::vector<Tensor> targets = {Tensor::Matrix(1, 2, {1.5, 2}),
                                       Tensor::Matrix(1, 2, {2, 5})};
  // (|1 - 1.5| + |2 - 2| + |3 - 2| + |4 - 5|) / 4
  EXPECT_DOUBLE_EQ(PathLoss(predictions, targets).value()[0], 0.625);
}

TEST(PathLossTest, HorizonOneIsMeanAbsoluteError) {
  Tape tape;
  const Tensor pred = Tensor::Matrix(2, 2, {1, -1, 0, 4});
  const Tensor target = Tensor::Matrix(2, 2, {0, 1, 0, 1});
  const std::vector<Var> predictions = {tape.Constant(pred)};
  const std::vector<Tensor> targets = {target};
  EXPECT_DOUBLE_EQ(PathLoss(predictions, targets).value()[0], 6.0 / 4.0);
  const std::vector<Tensor> exact = {pred};
  EXPECT_EQ(PathLoss(predictions, exact).value()[0], 0.0);
  EXPECT_THROW(PathLoss(predictions, {}), DimensionError);
}

TEST(PathLossTest, PerfectModelGivesZeroLoss) {
  envs::CartPole env(envs::CartPole::Task::kSwingup);
  auto raw = env.AnalyticField();
  const data::ReplayBuffer buffer = data::CollectRandom(env, 200, 200, 1);
  const data::Normalizer norm = data::Normalizer::Fit(buffer.AllStates());
  NormalizedField field(*raw, norm);
  std::mt19937_64 rng(4);
  DynamicsModel model(
      SmallConfig(ModelKind::kDynodeRk4, env.spec().dt, env.spec().substeps), 4,
      1, rng);
  const auto rollouts = buffer.SampleSequences(16, 20, rng);
  const data::SequenceBatch batch = data::ToSequenceBatch(rollouts);
  Tape tape;
  Var z = tape.Constant(norm.Normalize(batch.start));
  std::vector<Var> predictions;
  std::vector<Tensor> targets;
  for (std::size_t h = 0; h < batch.horizon(); ++h) {
    z = model.StepWithField(field, z, tape.Constant(batch.actions[h]));
    predictions.push_back(z);
    targets.push_back(norm.Normalize(batch.states[h]));
  }
  const double loss = PathLoss(predictions, targets).value()[0];
  EXPECT_GE(loss, 0.0);
  EXPECT_LT(loss, 1e-9);
}

// Path loss as a function of the parameters, with optional gradient.
double ModelPathLoss(const DynamicsModel& model, const data::SequenceBatch& b,
                     ad::MlpParams* grads) {
  Tape tape;
  ad::BoundMlp net(model.net(), tape);
  std::vector<Var> actions;
  for (const Tensor& a : b.actions) actions.push_back(tape.Constant(a));
  const auto predictions =
      model.UnrollNormalized(net, tape.Constant(b.start), actions);
  Var loss = PathLoss(predictions, b.states);
  if (grads != nullptr) {
    tape.Backward(loss);
    *grads = net.Gradients();
  }
  return loss.value()[0];
}

TEST(PathLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (ModelKind kind : {ModelKind::kDynodeEuler, ModelKind::kDynodeRk4}) {
    for (std::size_t horizon : {1u, 5u, 20u}) {
      DynamicsModel model(SmallConfig(kind, 0.1), 2, 1, rng);
      Randomize(model.mutable_net(), rng, 0.4);
      std::vector<data::Rollout> rollouts(4);
      for (auto& r : rollouts) {
        r.start = {u(rng), u(rng)};
        for (std::size_t h = 0; h < horizon; ++h) {
          r.actions.push_back({u(rng)});
          r.states.push_back({u(rng), u(rng)});
        }
      }
      const data::SequenceBatch batch = data::ToSequenceBatch(rollouts);
      ad::MlpParams grads;
      ModelPathLoss(model, batch, &grads);
      auto params = model.mutable_net().Tensors();
      auto grad_tensors = grads.Tensors();
      const double step = 1e-5;
      for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t]->size(); i += 3) {
          double& p = (*params[t])[i];
          const double saved = p;
          p = saved + step;
          const double up = ModelPathLoss(model, batch, nullptr);
          p = saved - step;
          const double down = ModelPathLoss(model, batch, nullptr);
          p = saved;
          const double numeric = (up - down) / (2 * step);
          const double analytic = (*grad_tensors[t])[i];
          EXPECT_LT(std::abs(numeric - analytic) /
                        std::max({std::abs(numeric), std::abs(analytic), 1e-6}),
                    1e-4)
              << ModelKindName(kind) << " H=" << horizon;
        }
      }
    }
  }
}

// ds/dt = a in one dimension, dt = 0.1.
data::ReplayBuffer IntegratorBuffer(std::size_t episodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  data::ReplayBuffer buffer(1, 1);
  for (std::size_t e = 0; e < episodes; ++e) {
    double s = u(rng);
    for (int t = 0; t < 50; ++t) {
      const double a = u(rng);
      buffer.Add({{s}, {a}, 0.0, {s + 0.1 * a}, false});
      s += 0.1 * a;
    }
    buffer.CloseEpisode();
  }
  return buffer;
}

TEST(TrainDynodeTest, LearnsSyntheticIntegrator) {
  const data::ReplayBuffer train = IntegratorBuffer(20, 1);
  std::mt19937_64 rng(6);
  DynamicsModel model(SmallConfig(ModelKind::kDynodeEuler, 0.1), 1, 1, rng);
  model.set_normalizer(data::Normalizer::Fit(train.AllStates()));
  TrainConfig cfg;
  cfg.horizon = 10;
  cfg.max_iterations = 1500;
  cfg.noise_sigma = 0.0;
  cfg.seed = 3;
  const TrainResult result = TrainDynode(model, train, cfg);
  EXPECT_EQ(result.batch_losses.size(), 1500u);
  EXPECT_LT(result.probe.back().loss, result.probe.front().loss);
  // Open-loop H=10 error on fresh data, in normalized units.
  const data::ReplayBuffer test = IntegratorBuffer(5, 99);
  std::mt19937_64 eval_rng(7);
  const auto rollouts = test.SampleSequences(50, 10, eval_rng);
  const data::SequenceBatch batch = data::ToSequenceBatch(rollouts);
  const auto predicted = model.UnrollToNormalized(batch.start, batch.actions);
  double total = 0.0;
  for (std::size_t h = 0; h < 10; ++h) {
    const Tensor truth = model.normalizer().Normalize(batch.states[h]);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      total += std::abs(predicted[h][i] - truth[i]);
    }
  }
  EXPECT_LT(total / (10 * 50), 1e-2);
}

TEST(TrainDynodeTest, ZeroIterationsLeavesModelUnchanged) {
  const data::ReplayBuffer train = IntegratorBuffer(2, 1);
  std::mt19937_64 rng(6);
  for (ModelKind kind : {ModelKind::kDynodeRk4, ModelKind::kBaseline}) {
    DynamicsModel model(SmallConfig(kind), 1, 1, rng);
    Randomize(model.mutable_net(), rng, 0.3);
    const DynamicsModel before = model;
    TrainConfig cfg;
    cfg.max_iterations = 0;
    const TrainResult result = TrainModel(model, train, cfg);
    EXPECT_EQ(model, before);
    EXPECT_TRUE(result.batch_losses.empty());
  }
}

TEST(TrainDynodeTest, NanAbortNamesIteration) {
  const data::ReplayBuffer train = IntegratorBuffer(2, 1);
  std::mt19937_64 rng(6);
  DynamicsModel model(SmallConfig(ModelKind::kDynodeEuler, 1.0), 1, 1, rng);
  for (double& v : model.mutable_net().layers.back().bias.data()) v = 1e308;
  TrainConfig cfg;
  cfg.horizon = 10;
  cfg.max_iterations = 5;
  cfg.eval_every = 0;
  try {
    TrainDynode(model, train, cfg);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("training iteration 0"),
              std::string::npos)
        << e.what();
  }
}

TEST(TrainDynodeTest, RejectsBadConfigAndKind) {
  const data::ReplayBuffer train = IntegratorBuffer(2, 1);
  std::mt19937_64 rng(6);
  DynamicsModel dynode(SmallConfig(ModelKind::kDynodeEuler), 1, 1, rng);
  DynamicsModel nn(SmallConfig(ModelKind::kBaseline), 1, 1, rng);
  TrainConfig cfg;
  cfg.lr = 0;
  EXPECT_THROW(TrainDynode(dynode, train, cfg), std::invalid_argument);
  EXPECT_THROW(TrainDynode(nn, train, TrainConfig{}), std::invalid_argument);
  EXPECT_THROW(TrainBaseline(dynode, train, TrainConfig{}),
               std::invalid_argument);
  TrainConfig too_long;
  too_long.horizon = 51;
  EXPECT_THROW(TrainDynode(dynode, train, too_long), std::logic_error);
}

TEST(TrainBaselineTest, OverfitsOneTransition) {
  data::ReplayBuffer buffer(2, 1);
  buffer.Add({{0.3, -0.2}, {0.5}, 0.0, {0.35, -0.1}, false});
  std::mt19937_64 rng(8);
  DynamicsModel model(SmallConfig(ModelKind::kBaseline), 2, 1, rng);
  model.set_normalizer(data::Normalizer::Fit(buffer.AllStates()));
  TrainConfig cfg;
  cfg.batch = 8;
  cfg.noise_sigma = 0.0;
  cfg.max_iterations = 3000;
  cfg.lr = 1e-4;
  TrainBaseline(model, buffer, cfg);
  const Tensor next = model.PredictNext(Tensor::Matrix(1, 2, {0.3, -0.2}),
                                        Tensor::Matrix(1, 1, {0.5}));
  EXPECT_NEAR(next[0], 0.35, 1e-4);
  EXPECT_NEAR(next[1], -0.1, 1e-4);
}

TEST(TrainBaselineTest, ReducesLossOnSyntheticIntegrator) {
  const data::ReplayBuffer train = IntegratorBuffer(20, 1);
  std::mt19937_64 rng(6);
  DynamicsModel model(SmallConfig(ModelKind::kBaseline), 1, 1, rng);
  model.set_normalizer(data::Normalizer::Fit(train.AllStates()));
  TrainConfig cfg;
  cfg.batch = 256;
  cfg.max_iterations = 500;
  const TrainResult result = TrainBaseline(model, train, cfg);
  EXPECT_LT(result.probe.back().loss, 0.5 * result.probe.front().loss);
}

TEST(TrainDynodeTest, MountainCarLossDecreasesForEverySeed) {
  envs::MountainCar env;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const data::ReplayBuffer buffer = data::CollectRandom(env, 500, 200, seed);
    std::mt19937_64 rng(seed);
    ModelConfig mc = SmallConfig(ModelKind::kDynodeEuler, env.spec().dt);
    mc.hidden = {64, 64};
    DynamicsModel model(mc, 2, 1, rng);
    model.set_normalizer(data::Normalizer::Fit(buffer.AllStates()));
    TrainConfig cfg;
    cfg.horizon = 20;
    cfg.max_iterations = 2000;
    cfg.eval_every = 2000;
    cfg.seed = seed;
    const TrainResult result = TrainDynode(model, buffer, cfg);
    ASSERT_EQ(result.probe.size(), 2u);
    EXPECT_EQ(result.probe[1].iteration, 2000u);
    EXPECT_LT(result.probe[1].loss, result.probe[0].loss) << "seed " << seed;
  }
}

TEST(CheckpointTest, ModelRoundTripAndMissingFile) {
  std::mt19937_64 rng(9);
  DynamicsModel model(SmallConfig(ModelKind::kDynodeRk4, 0.02, 2), 4, 1, rng);
  Randomize(model.mutable_net(), rng, 1.0);
  model.set_normalizer(data::Normalizer({1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.4}));
  const auto dir = std::filesystem::temp_directory_path() / "dynode_models_test";
  std::filesystem::create_directories(dir);
  SaveModel(dir / "m", model, 7);
  std::size_t horizon = 0;
  EXPECT_EQ(LoadModel(dir / "m", &horizon), model);
  EXPECT_EQ(horizon, 7u);
  EXPECT_THROW(LoadModel(dir / "absent"), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace dynode::models
