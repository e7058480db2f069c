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
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dynode/autodiff/adam.h"
#include "dynode/autodiff/checkpoint.h"
#include "dynode/autodiff/mlp.h"
#include "dynode/autodiff/tape.h"
#include "dynode/common/errors.h"

namespace dynode::ad {
namespace {

Tensor RandomMatrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                    double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t = Tensor::Zeros(rows, cols);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Central differences of a scalar function of one tensor.
Tensor FiniteDifference(const std::function<double(const Tensor&)>& f,
                        Tensor x, double h = 1e-5) {
  Tensor grad(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Builds the graph `build(leaf)` for the gradient and compares against
// central differences of the same graph's value.
void ExpectGradientMatches(const std::function<Var(Var)>& build,
                           const Tensor& x, double tolerance = 1e-5) {
  Tape tape;
  Var leaf = tape.Leaf(x);
  Var root = build(leaf);
  tape.Backward(root);
  const Tensor analytic = tape.adjoint(leaf);
  const Tensor numeric = FiniteDifference(
      [&](const Tensor& probe) {
        Tape t;
        return build(t.Leaf(probe)).value()[0];
      },
      x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_LT(RelativeError(analytic[i], numeric[i]), tolerance)
        << "coordinate " << i << " analytic " << analytic[i] << " numeric "
        << numeric[i];
  }
}

// Straight-line forward evaluation used as an independent oracle.
std::vector<double> OracleForward(const MlpParams& params,
                                  std::vector<double> x) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Layer& layer = params.layers[l];
    std::vector<double> y(layer.weight.rows());
    for (std::size_t r = 0; r < y.size(); ++r) {
      double acc = layer.bias[r];
      for (std::size_t c = 0; c < x.size(); ++c) acc += layer.weight.at(r, c) * x[c];
      const bool last = l + 1 == params.layers.size();
      if (!last) {
        acc = params.activation == Activation::kTanh ? std::tanh(acc)
                                                     : std::max(acc, 0.0);
      } else if (params.output_activation == OutputActivation::kTanh) {
        acc = std::tanh(acc);
      }
      y[r] = acc;
    }
    x = std::move(y);
  }
  return x;
}

TEST(TensorTest, RejectsInconsistentShape) {
  EXPECT_THROW(Tensor({2, 3}, {1.0, 2.0}), DimensionError);
  EXPECT_THROW(Tensor({0}), DimensionError);
  EXPECT_NO_THROW(Tensor({2, 3}, std::vector<double>(6)));
}

TEST(ForwardMlpTest, IdentityLayer) {
  MlpParams params;
  params.layers.push_back({Tensor::Matrix(2, 2, {1, 0, 0, 1}),
                           Tensor::Vector({0, 0})});
  const Tensor y = EvaluateMlp(params, Tensor::Vector({1, 2}));
  EXPECT_EQ(y.vec(), (std::vector<double>{1, 2}));
}

TEST(ForwardMlpTest, ZeroTanhLayerGivesZero) {
  MlpParams params;
  params.output_activation = OutputActivation::kTanh;
  params.layers.push_back({Tensor::Zeros(3, 2), Tensor::Vector({0, 0, 0})});
  const Tensor y = EvaluateMlp(params, Tensor::Vector({5.0, -7.0}));
  EXPECT_EQ(y.vec(), (std::vector<double>{0, 0, 0}));
}

TEST(ForwardMlpTest, MatchesStraightLineOracle) {
  std::mt19937_64 rng(7);
  for (Activation act : {Activation::kTanh, Activation::kRelu}) {
    const std::size_t sizes[] = {4, 16, 3};
    MlpParams params = InitMlp(sizes, act, OutputActivation::kTanh, rng);
    const Tensor x = RandomMatrix(5, 4, rng);
    const Tensor y = EvaluateMlp(params, x);
    for (std::size_t r = 0; r < 5; ++r) {
      const std::vector<double> expected = OracleForward(params, x.Row(r));
      for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_NEAR(y.at(r, c), expected[c], 1e-12);
      }
    }
  }
}

TEST(ForwardMlpTest, DimensionMismatchThrows) {
  std::mt19937_64 rng(1);
  const std::size_t sizes[] = {3, 4, 2};
  MlpParams params =
      InitMlp(sizes, Activation::kTanh, OutputActivation::kIdentity, rng);
  EXPECT_THROW(EvaluateMlp(params, Tensor::Vector({1, 2})), DimensionError);
}

TEST(ForwardMlpTest, NonFiniteActivationDetected) {
  MlpParams params;
  params.layers.push_back({Tensor::Matrix(1, 1, {1e308}), Tensor::Vector({0})});
  EXPECT_THROW(EvaluateMlp(params, Tensor::Vector({1e10})), NumericError);
}

TEST(InitMlpTest, UniformFanInBoundsAndZeroLastLayer) {
  std::mt19937_64 rng(3);
  const std::size_t sizes[] = {9, 25, 2};
  MlpParams params = InitMlp(sizes, Activation::kTanh,
                             OutputActivation::kIdentity, rng, true);
  for (double w : params.layers[0].weight.data()) {
    EXPECT_LE(std::abs(w), 1.0 / 3.0);
  }
  for (double w : params.layers[1].weight.data()) EXPECT_EQ(w, 0.0);
  for (double b : params.layers[1].bias.data()) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(params.ParameterCount(), 9u * 25 + 25 + 25 * 2 + 2);
}

TEST(BackwardTest, SquareDerivative) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Scalar(3.0));
  tape.Backward(Square(x));
  EXPECT_DOUBLE_EQ(tape.adjoint(x)[0], 6.0);
}

TEST(BackwardTest, TanhDerivativeAtZero) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Scalar(0.0));
  tape.Backward(Tanh(x));
  EXPECT_DOUBLE_EQ(tape.adjoint(x)[0], 1.0);
}

TEST(PrimitiveTest, TanhMatchesLibm) {
  std::vector<double> xs;
  for (double x = -25.0; x <= 25.0; x += 0.0137) xs.push_back(x);
  for (double x : {0.0, 1e-300, -1e-12, 0.099999, 0.1, -0.1, 0.100001, 800.0,
                   -800.0}) {
    xs.push_back(x);
  }
  Tape tape;
  const Tensor y = Tanh(tape.Constant(Tensor::Vector(xs))).value();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double expected = std::tanh(xs[i]);
    EXPECT_LE(std::abs(y[i] - expected),
              2e-15 * std::max(std::abs(expected), 1e-300))
        << "x=" << xs[i];
  }
}

TEST(BackwardTest, RootMustBeScalar) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({1, 2}));
  EXPECT_THROW(tape.Backward(Square(x)), DimensionError);
}

TEST(BackwardTest, UnreachedLeavesGetZero) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({1, 2}));
  Var unused = tape.Leaf(Tensor::Vector({3, 4}));
  tape.Backward(Sum(x));
  EXPECT_EQ(tape.adjoint(unused).vec(), (std::vector<double>{0, 0}));
  EXPECT_EQ(tape.adjoint(x).vec(), (std::vector<double>{1, 1}));
}

TEST(BackwardTest, ConstantsReceiveNoGradientWork) {
  Tape tape;
  Var c = tape.Constant(Tensor::Vector({1, 2}));
  Var x = tape.Leaf(Tensor::Vector({3, 4}));
  tape.Backward(Sum(Mul(c, x)));
  EXPECT_EQ(tape.adjoint(c).vec(), (std::vector<double>{0, 0}));
  EXPECT_EQ(tape.adjoint(x).vec(), (std::vector<double>{1, 2}));
}

TEST(BackwardTest, DetachStopsGradient) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({3, 4}));
  // d/dx [x * detach(x)] = detach(x) only.
  tape.Backward(Sum(Mul(x, Detach(x))));
  EXPECT_EQ(tape.adjoint(x).vec(), (std::vector<double>{3, 4}));
}

// Every primitive against central differences on randomized inputs.
TEST(GradientCheckTest, Primitives) {
  std::mt19937_64 rng(11);
  const Tensor x = RandomMatrix(3, 4, rng);
  const Tensor positive = RandomMatrix(3, 4, rng, 0.5, 2.0);
  const Tensor other = RandomMatrix(3, 4, rng);
  const Tensor row = RandomMatrix(1, 4, rng);
  const Tensor square = RandomMatrix(4, 2, rng);

  auto weights = [&](Var v) {
    // Random linear functional keeps every coordinate's gradient distinct.
    Tape& tape = *v.tape();
    std::mt19937_64 local(99);
    return Sum(Mul(v, tape.Constant(RandomMatrix(v.value().rows(),
                                                 v.value().cols(), local))));
  };
  auto with_other = [&](Var v) { return v.tape()->Constant(other); };

  const std::vector<std::pair<const char*, std::function<Var(Var)>>> cases = {
      {"add", [&](Var v) { return weights(Add(v, with_other(v))); }},
      {"sub", [&](Var v) { return weights(Sub(with_other(v), v)); }},
      {"mul", [&](Var v) { return weights(Mul(v, v)); }},
      {"scale", [&](Var v) { return weights(Scale(v, -2.5)); }},
      {"add_scalar", [&](Var v) { return weights(AddScalar(v, 0.3)); }},
      {"tanh", [&](Var v) { return weights(Tanh(v)); }},
      {"relu", [&](Var v) { return weights(Relu(v)); }},
      {"abs", [&](Var v) { return weights(Abs(v)); }},
      {"square", [&](Var v) { return weights(Square(v)); }},
      {"exp", [&](Var v) { return weights(Exp(v)); }},
      {"softplus", [&](Var v) { return weights(Softplus(v)); }},
      {"sin", [&](Var v) { return weights(Sin(v)); }},
      {"cos", [&](Var v) { return weights(Cos(v)); }},
      {"clamp", [&](Var v) { return weights(Clamp(v, -0.5, 0.5)); }},
      {"minimum", [&](Var v) { return weights(Minimum(v, with_other(v))); }},
      {"mean", [&](Var v) { return Mean(Square(v)); }},
      {"row_sum", [&](Var v) { return weights(Square(ConcatCols(RowSum(v), v))); }},
      {"slice", [&](Var v) { return weights(SliceCols(Tanh(v), 1, 2)); }},
      {"add_row",
       [&](Var v) { return weights(AddRow(v, v.tape()->Constant(row))); }},
      {"matmul",
       [&](Var v) { return weights(MatMul(v, v.tape()->Constant(square))); }},
  };
  for (const auto& [name, build] : cases) {
    SCOPED_TRACE(name);
    ExpectGradientMatches(build, x);
  }
  {
    SCOPED_TRACE("div numerator");
    ExpectGradientMatches(
        [&](Var v) { return weights(Div(v, v.tape()->Constant(positive))); }, x);
  }
  {
    SCOPED_TRACE("div denominator");
    ExpectGradientMatches(
        [&](Var v) { return weights(Div(v.tape()->Constant(x), v)); }, positive);
  }
  SCOPED_TRACE("log");
  ExpectGradientMatches([&](Var v) { return weights(Log(v)); }, positive);
}

TEST(GradientCheckTest, LinearAllInputs) {
  std::mt19937_64 rng(5);
  const Tensor x = RandomMatrix(6, 3, rng);
  const Tensor w = RandomMatrix(4, 3, rng);
  const Tensor b = RandomMatrix(1, 4, rng);
  const Tensor bias = Tensor::Vector(b.vec());
  ExpectGradientMatches(
      [&](Var v) {
        Tape& t = *v.tape();
        return Mean(Tanh(Linear(v, t.Constant(w), t.Constant(bias))));
      },
      x);
  ExpectGradientMatches(
      [&](Var v) {
        Tape& t = *v.tape();
        return Mean(Tanh(Linear(t.Constant(x), v, t.Constant(bias))));
      },
      w);
  ExpectGradientMatches(
      [&](Var v) {
        Tape& t = *v.tape();
        return Mean(Tanh(Linear(t.Constant(x), t.Constant(w), v)));
      },
      bias);
}

// Full MLP loss: every parameter coordinate against central differences.
TEST(GradientCheckTest, MlpLossAllParameters) {
  std::mt19937_64 rng(21);
  const std::size_t sizes[] = {3, 8, 8, 2};
  MlpParams params =
      InitMlp(sizes, Activation::kTanh, OutputActivation::kIdentity, rng);
  const Tensor x = RandomMatrix(5, 3, rng);
  const Tensor target = RandomMatrix(5, 2, rng);

  auto loss_value = [&](const MlpParams& p) {
    Tape tape;
    BoundMlp mlp(p, tape);
    Var y = mlp.Forward(tape.Constant(x));
    return Mean(Abs(Sub(y, tape.Constant(target)))).value()[0] +
           Mean(Square(y)).value()[0];
  };
  Tape tape;
  BoundMlp mlp(params, tape);
  Var y = mlp.Forward(tape.Constant(x));
  Var loss = Add(Mean(Abs(Sub(y, tape.Constant(target)))), Mean(Square(y)));
  tape.Backward(loss);
  const MlpParams grads = mlp.Gradients();

  const double h = 1e-5;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    for (Tensor* which : {&params.layers[l].weight, &params.layers[l].bias}) {
      const Tensor& g = which == &params.layers[l].weight
                            ? grads.layers[l].weight
                            : grads.layers[l].bias;
      for (std::size_t i = 0; i < which->size(); ++i) {
        const double saved = (*which)[i];
        (*which)[i] = saved + h;
        const double up = loss_value(params);
        (*which)[i] = saved - h;
        const double down = loss_value(params);
        (*which)[i] = saved;
        EXPECT_LT(RelativeError(g[i], (up - down) / (2 * h)), 1e-5)
            << "layer " << l << " coordinate " << i;
      }
    }
  }
}

TEST(PropertyTest, AdjointLinearity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = RandomMatrix(2, 3, rng);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    const double a = coef(rng);
    const double b = coef(rng);
    auto f = [](Var v) { return Sum(Tanh(Mul(v, v))); };
    auto g = [](Var v) { return Mean(Exp(Scale(v, 0.5))); };

    auto grad_of = [&](const std::function<Var(Var)>& build) {
      Tape tape;
      Var leaf = tape.Leaf(x);
      tape.Backward(build(leaf));
      return tape.adjoint(leaf);
    };
    const Tensor gf = grad_of(f);
    const Tensor gg = grad_of(g);
    const Tensor combined =
        grad_of([&](Var v) { return Add(Scale(f(v), a), Scale(g(v), b)); });
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(combined[i], a * gf[i] + b * gg[i], 1e-12);
    }
  }
}

TEST(PropertyTest, DeterministicValuesAndGradients) {
  auto run = [] {
    std::mt19937_64 rng(42);
    const std::size_t sizes[] = {4, 32, 32, 4};
    MlpParams params =
        InitMlp(sizes, Activation::kTanh, OutputActivation::kIdentity, rng);
    const Tensor x = RandomMatrix(16, 4, rng);
    Tape tape;
    BoundMlp mlp(params, tape);
    Var loss = Mean(Abs(mlp.Forward(tape.Constant(x))));
    tape.Backward(loss);
    return std::make_pair(loss.value(), mlp.Gradients());
  };
  const auto first = run();
  const auto second = run();
  EXPECT_EQ(first.first, second.first);
  EXPECT_EQ(first.second, second.second);
}

TEST(NanPolicyTest, NonFiniteForwardAborts) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({-1.0}));
  EXPECT_THROW(Log(x), NumericError);
}

TEST(NanPolicyTest, NonFiniteAdjointAborts) {
  Tape tape;
  Var x = tape.Leaf(Tensor::Vector({1e-320}));
  // d/dx log(x) = 1/x overflows for a subnormal input.
  Var y = Log(x);
  EXPECT_THROW(tape.Backward(Sum(y)), NumericError);
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  Tensor p = Tensor::Vector({1.0, -2.0, 3.0});
  const Tensor g = Tensor::Vector({0.0, 0.0, 0.0});
  AdamState state;
  Tensor* params[] = {&p};
  const Tensor* grads[] = {&g};
  for (int i = 0; i < 10; ++i) AdamStep(params, grads, state, AdamConfig{});
  EXPECT_EQ(p.vec(), (std::vector<double>{1.0, -2.0, 3.0}));
  EXPECT_EQ(state.step, 10);
}

TEST(AdamTest, FirstStepIsSignedLearningRate) {
  Tensor p = Tensor::Vector({0.0, 0.0});
  const Tensor g = Tensor::Vector({0.37, -5.0});
  AdamState state;
  Tensor* params[] = {&p};
  const Tensor* grads[] = {&g};
  const AdamConfig config;
  AdamStep(params, grads, state, config);
  // m_hat = g and v_hat = g^2 after bias correction.
  EXPECT_NEAR(p[0], -config.lr * 0.37 / (0.37 + config.epsilon), 1e-18);
  EXPECT_NEAR(p[1], config.lr * 5.0 / (5.0 + config.epsilon), 1e-18);
  EXPECT_NEAR(p[0], -config.lr, 1e-10);
  EXPECT_NEAR(p[1], config.lr, 1e-10);
}

TEST(AdamTest, QuadraticBowlConverges) {
  Tensor x = Tensor::Vector({1.0});
  AdamState state;
  AdamConfig config;
  config.lr = 1e-2;
  for (int i = 0; i < 500; ++i) {
    Tape tape;
    Var v = tape.Leaf(x);
    tape.Backward(Sum(Square(v)));
    const Tensor g = tape.adjoint(v);
    Tensor* params[] = {&x};
    const Tensor* grads[] = {&g};
    AdamStep(params, grads, state, config);
  }
  EXPECT_LT(std::abs(x[0]), 1e-3);
}

TEST(AdamTest, ShapeMismatchThrows) {
  Tensor p = Tensor::Vector({1.0, 2.0});
  const Tensor g = Tensor::Vector({1.0});
  AdamState state;
  Tensor* params[] = {&p};
  const Tensor* grads[] = {&g};
  EXPECT_THROW(AdamStep(params, grads, state, AdamConfig{}), DimensionError);
}

TEST(CheckpointTest, BitExactRoundTrip) {
  std::mt19937_64 rng(13);
  const std::size_t sizes[] = {5, 7, 3};
  MlpParams params =
      InitMlp(sizes, Activation::kRelu, OutputActivation::kTanh, rng);
  params.layers[0].weight[0] = -0.0;
  params.layers[1].bias[2] = 5e-324;
  const std::string bytes = SerializeMlp(params);
  EXPECT_EQ(bytes.substr(0, 7), "DYNODE1");
  EXPECT_EQ(bytes.size(), 7u + 2 + 4 + 2 * 8 + 8 * params.ParameterCount());
  const MlpParams back = DeserializeMlp(bytes);
  EXPECT_EQ(SerializeMlp(back), bytes);
  EXPECT_EQ(back.activation, Activation::kRelu);
  EXPECT_EQ(back.output_activation, OutputActivation::kTanh);
  EXPECT_TRUE(std::signbit(back.layers[0].weight[0]));
}

TEST(CheckpointTest, RejectsCorruptInput) {
  std::mt19937_64 rng(13);
  const std::size_t sizes[] = {2, 2};
  const std::string bytes = SerializeMlp(
      InitMlp(sizes, Activation::kTanh, OutputActivation::kIdentity, rng));
  EXPECT_THROW(DeserializeMlp("DYNODE2" + bytes.substr(7)), IoError);
  EXPECT_THROW(DeserializeMlp(bytes.substr(0, bytes.size() - 1)), IoError);
  EXPECT_THROW(DeserializeMlp(bytes + "x"), IoError);
}

}  // namespace
}  // namespace dynode::ad
