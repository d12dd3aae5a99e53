// Copyright 2026 The invio Authors
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

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace invio::ad {

using Tensor = Eigen::MatrixXd;

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kScale,
  kMul,
  kMatMul,
  kHat,
  kTranspose,
  kSin,
  kCos,
  kSqrt,
  kReciprocal,
  kRelu,
  kAffine,
  kSum,
  kHuber,
  kConcat,
  kSlice,
  kConv1d,
  kAtan2,
};

const char* op_name(Op op);

enum class HuberMode : std::uint8_t {
  kNorm,           // ρ(‖x‖): ½r² for r ≤ δ, δ(r - δ/2) beyond
  kComponentwise,  // Σ_i ρ(|x_i|)
};

struct OpParams {
  double scalar = 0.0;  // kScale factor, kHuber δ
  int row = 0;          // kSlice origin
  int col = 0;
  int rows = 0;  // kSlice extent
  int cols = 0;
  int stride = 1;  // kConv1d
  int padding = 0;
  HuberMode huber = HuberMode::kNorm;
};

class Tape;

/// Handle to a tape node. Cheap to copy; only valid with the tape that made it.
struct Var {
  Tape* tape = nullptr;
  std::int32_t id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor& value() const;
  double scalar() const;
};

/// Per-node adjoints produced by Tape::backward. Nodes that received no
/// gradient report zeros of the node's shape.
class Gradients {
 public:
  Gradients() = default;
  Gradients(const Tape* tape, std::vector<Tensor> grads) : tape_(tape), grads_(std::move(grads)) {}

  Tensor of(Var v) const;
  bool touched(Var v) const;

 private:
  const Tape* tape_ = nullptr;
  std::vector<Tensor> grads_;
};

/// Reverse-mode tape over dense double tensors. Nodes are appended in
/// evaluation order; backward walks them in reverse, so two backward passes
/// over the same tape are bit-identical.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  // Vars point at the tape, so it must stay put.
  Tape(Tape&&) = delete;
  Tape& operator=(Tape&&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }
  Var scalar_constant(double v);

  /// Evaluates `op` on the inputs' values and appends the result. Throws
  /// InvalidArgument on arity or shape mismatch.
  Var record(Op op, std::span<const Var> inputs, const OpParams& params = {});
  Var record(Op op, std::initializer_list<Var> inputs, const OpParams& params = {}) {
    return record(op, std::span<const Var>(inputs.begin(), inputs.size()), params);
  }

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  Op op(Var v) const;

  /// d(seed)/d(node) for every node. The seed must be 1x1.
  Gradients backward(Var seed) const;

  /// Re-evaluates every non-leaf node from the stored leaves.
  std::vector<Tensor> replay() const;

  void reserve(std::size_t nodes);

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::int32_t first_input = 0;
    std::int32_t num_inputs = 0;
    OpParams params;
    Tensor value;
    bool requires_grad = false;
  };

  void check(Var v) const;
  void accumulate_inputs(const Node& node, const Tensor& grad, std::vector<Tensor>& grads) const;

  std::vector<Node> nodes_;
  std::vector<std::int32_t> inputs_;
};

// Op wrappers. All inputs must belong to the same tape.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
/// Hadamard product, or broadcast when either side is 1x1.
Var mul(Var a, Var b);
Var matmul(Var a, Var b);
/// 3x1 -> 3x3 skew matrix.
Var hat(Var a);
Var transpose(Var a);
Var sin(Var a);
Var cos(Var a);
Var sqrt(Var a);
Var reciprocal(Var a);
Var relu(Var a);
/// W x + b; b may be a column broadcast across the columns of x.
Var affine(Var w, Var x, Var b);
Var sum(Var a);
Var huber(Var a, double delta, HuberMode mode = HuberMode::kNorm);
/// Vertical stacking; all parts need the same column count.
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
Var slice(Var a, int row, int col, int rows, int cols);
/// x: C_in x T, w: C_out x C_in*K, b: C_out x 1.
Var conv1d(Var x, Var w, Var b, int stride, int padding);
Var atan2(Var y, Var x);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, double s) { return scale(a, s); }
inline Var operator*(double s, Var a) { return scale(a, s); }
inline Var operator-(Var a) { return scale(a, -1.0); }

}  // namespace invio::ad
