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

// Reverse-mode automatic differentiation over dense tensors.
//
// A Tape records primitive operations in execution order. Every recorded
// value is a node; parents always precede children, so a single reverse sweep
// from a scalar root accumulates adjoints for all reachable nodes. Values are
// checked for NaN/Inf as they are produced, and adjoints as they are
// propagated; either failure throws NumericError naming the primitive.
//
// Typical use:
//
//   Tape tape;
//   Var w = tape.Leaf(weights);
//   Var x = tape.Constant(inputs);
//   Var loss = Mean(Square(Linear(x, w, b)));
//   tape.Backward(loss);
//   const Tensor& dw = tape.adjoint(w);

#ifndef DYNODE_AUTODIFF_TAPE_H_
#define DYNODE_AUTODIFF_TAPE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dynode/autodiff/tensor.h"

namespace dynode::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid while the tape lives.
class Var {
 public:
  Var() = default;

  Tape* tape() const { return tape_; }
  int index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }
  const Tensor& value() const;

 private:
  friend class Tape;
  Var(Tape* tape, int index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  int index_ = -1;
};

enum class Op : std::uint8_t {
  kLeaf,
  kConstant,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kLinear,
  kMatMul,
  kAddRow,
  kTanh,
  kRelu,
  kAbs,
  kSquare,
  kExp,
  kLog,
  kSoftplus,
  kSin,
  kCos,
  kSum,
  kMean,
  kRowSum,
  kConcatCols,
  kSliceCols,
  kClamp,
  kMinimum,
  kDiv,
};

const char* OpName(Op op);

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable input (parameters, or states whose gradient is wanted).
  Var Leaf(Tensor value);
  // Input that never receives an adjoint.
  Var Constant(Tensor value);

  const Tensor& value(Var v) const;
  // Zero tensor for nodes the last backward pass did not reach.
  const Tensor& adjoint(Var v) const;

  // Seeds the scalar root with 1 and sweeps the tape in reverse.
  // Throws DimensionError if root is not a single-element tensor.
  void Backward(Var root);

  std::size_t size() const { return nodes_.size(); }
  bool requires_grad(Var v) const;

 private:
  struct Node {
    Op op = Op::kConstant;
    std::array<int, 3> parents = {-1, -1, -1};
    bool requires_grad = false;
    double scalar0 = 0.0;
    double scalar1 = 0.0;
    std::size_t aux0 = 0;
    std::size_t aux1 = 0;
    Tensor value;
  };

  friend Var Record(Op op, std::array<Var, 3> parents, Tensor value,
                    double scalar0, double scalar1, std::size_t aux0,
                    std::size_t aux1);

  Var Push(Node node);
  void Propagate(int index);

  std::vector<Node> nodes_;
  mutable std::vector<Tensor> adjoints_;
};

// Elementwise, same shape.
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Div(Var a, Var b);
Var Minimum(Var a, Var b);
Var Scale(Var a, double factor);
Var AddScalar(Var a, double offset);
Var Tanh(Var a);
Var Relu(Var a);
Var Abs(Var a);
Var Square(Var a);
Var Exp(Var a);
Var Log(Var a);
Var Softplus(Var a);
Var Sin(Var a);
Var Cos(Var a);
// Clamps into [lo, hi]; the gradient is zero where the clamp is active.
Var Clamp(Var a, double lo, double hi);

// x [B x in], weight [out x in], bias [out]  ->  x * weight^T + bias.
Var Linear(Var x, Var weight, Var bias);
// a [m x k] * b [k x n].
Var MatMul(Var a, Var b);
// x [B x n] plus row [n] broadcast over rows.
Var AddRow(Var x, Var row);

// Reductions to a single-element tensor.
Var Sum(Var a);
Var Mean(Var a);
// [B x n] -> [B x 1].
Var RowSum(Var a);

Var ConcatCols(Var a, Var b);
Var SliceCols(Var a, std::size_t start, std::size_t count);

// Stop-gradient: a constant copy of a's value on the same tape.
Var Detach(Var a);

inline Var operator+(Var a, Var b) { return Add(a, b); }
inline Var operator-(Var a, Var b) { return Sub(a, b); }
inline Var operator*(Var a, Var b) { return Mul(a, b); }
inline Var operator/(Var a, Var b) { return Div(a, b); }
inline Var operator*(double c, Var a) { return Scale(a, c); }

}  // namespace dynode::ad

#endif  // DYNODE_AUTODIFF_TAPE_H_
