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

#include "invio/autodiff.hpp"

#include <cmath>
#include <string>

#include "invio/error.hpp"
#include "invio/kernels.hpp"

namespace invio::ad {

namespace {

using Inputs = std::span<const Tensor* const>;

std::string shape_of(const Tensor& t) { return std::to_string(t.rows()) + "x" + std::to_string(t.cols()); }

[[noreturn]] void shape_error(Op op, const std::string& detail) {
  throw InvalidArgument(std::string("autodiff ") + op_name(op) + ": " + detail);
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.rows() == b.rows() && a.cols() == b.cols(); }
bool is_scalar(const Tensor& t) { return t.rows() == 1 && t.cols() == 1; }

int expected_arity(Op op) {
  switch (op) {
    case Op::kLeaf:
      return 0;
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kMatMul:
    case Op::kAtan2:
      return 2;
    case Op::kAffine:
    case Op::kConv1d:
      return 3;
    case Op::kConcat:
      return -1;
    default:
      return 1;
  }
}

Tensor evaluate(Op op, Inputs in, const OpParams& p) {
  switch (op) {
    case Op::kLeaf:
      shape_error(op, "leaves are not evaluated");
    case Op::kAdd:
    case Op::kSub: {
      if (!same_shape(*in[0], *in[1])) shape_error(op, shape_of(*in[0]) + " vs " + shape_of(*in[1]));
      return op == Op::kAdd ? Tensor(*in[0] + *in[1]) : Tensor(*in[0] - *in[1]);
    }
    case Op::kScale:
      return p.scalar * *in[0];
    case Op::kMul: {
      const Tensor& a = *in[0];
      const Tensor& b = *in[1];
      if (same_shape(a, b)) return a.cwiseProduct(b);
      if (is_scalar(b)) return a * b(0, 0);
      if (is_scalar(a)) return b * a(0, 0);
      shape_error(op, shape_of(a) + " vs " + shape_of(b));
    }
    case Op::kMatMul:
      if (in[0]->cols() != in[1]->rows()) shape_error(op, shape_of(*in[0]) + " * " + shape_of(*in[1]));
      return *in[0] * *in[1];
    case Op::kHat: {
      const Tensor& a = *in[0];
      if (a.rows() != 3 || a.cols() != 1) shape_error(op, "expects 3x1, got " + shape_of(a));
      Tensor m(3, 3);
      // clang-format off
      m <<      0.0, -a(2, 0),  a(1, 0),
            a(2, 0),      0.0, -a(0, 0),
           -a(1, 0),  a(0, 0),      0.0;
      // clang-format on
      return m;
    }
    case Op::kTranspose:
      return in[0]->transpose();
    case Op::kSin:
      return in[0]->array().sin().matrix();
    case Op::kCos:
      return in[0]->array().cos().matrix();
    case Op::kSqrt:
      return in[0]->array().sqrt().matrix();
    case Op::kReciprocal:
      return in[0]->array().inverse().matrix();
    case Op::kRelu:
      return in[0]->cwiseMax(0.0);
    case Op::kAffine: {
      const Tensor& w = *in[0];
      const Tensor& x = *in[1];
      const Tensor& b = *in[2];
      if (w.cols() != x.rows()) shape_error(op, shape_of(w) + " * " + shape_of(x));
      if (b.rows() != w.rows() || (b.cols() != x.cols() && b.cols() != 1)) shape_error(op, "bias " + shape_of(b));
      Tensor out = w * x;
      if (b.cols() == out.cols()) {
        out += b;
      } else {
        out.colwise() += b.col(0);
      }
      return out;
    }
    case Op::kSum:
      return Tensor::Constant(1, 1, in[0]->sum());
    case Op::kHuber: {
      const double delta = p.scalar;
      if (!(delta > 0.0)) shape_error(op, "delta must be > 0");
      auto rho = [delta](double r) { return r <= delta ? 0.5 * r * r : delta * (r - 0.5 * delta); };
      if (p.huber == HuberMode::kNorm) return Tensor::Constant(1, 1, rho(in[0]->norm()));
      double acc = 0.0;
      for (Eigen::Index i = 0; i < in[0]->size(); ++i) acc += rho(std::abs(in[0]->data()[i]));
      return Tensor::Constant(1, 1, acc);
    }
    case Op::kConcat: {
      if (in.empty()) shape_error(op, "no parts");
      Eigen::Index rows = 0;
      for (const Tensor* t : in) {
        if (t->cols() != in[0]->cols()) shape_error(op, "column mismatch");
        rows += t->rows();
      }
      Tensor out(rows, in[0]->cols());
      Eigen::Index r = 0;
      for (const Tensor* t : in) {
        out.middleRows(r, t->rows()) = *t;
        r += t->rows();
      }
      return out;
    }
    case Op::kSlice: {
      const Tensor& a = *in[0];
      if (p.row < 0 || p.col < 0 || p.rows < 1 || p.cols < 1 || p.row + p.rows > a.rows() ||
          p.col + p.cols > a.cols()) {
        shape_error(op, "block out of range for " + shape_of(a));
      }
      return a.block(p.row, p.col, p.rows, p.cols);
    }
    case Op::kConv1d: {
      const auto shape = kernels::conv1d_shape(*in[0], *in[1], *in[2], p.stride, p.padding);
      Tensor out;
      kernels::conv1d_forward(*in[0], *in[1], *in[2], shape, out);
      return out;
    }
    case Op::kAtan2: {
      if (!same_shape(*in[0], *in[1])) shape_error(op, shape_of(*in[0]) + " vs " + shape_of(*in[1]));
      Tensor out(in[0]->rows(), in[0]->cols());
      for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = std::atan2(in[0]->data()[i], in[1]->data()[i]);
      return out;
    }
  }
  shape_error(op, "unknown op");
}

void add_to(Tensor& slot, const Tensor& g) {
  if (slot.size() == 0) {
    slot = g;
  } else {
    slot += g;
  }
}

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kScale: return "scale";
    case Op::kMul: return "mul";
    case Op::kMatMul: return "matmul";
    case Op::kHat: return "hat";
    case Op::kTranspose: return "transpose";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kSqrt: return "sqrt";
    case Op::kReciprocal: return "reciprocal";
    case Op::kRelu: return "relu";
    case Op::kAffine: return "affine";
    case Op::kSum: return "sum";
    case Op::kHuber: return "huber";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kConv1d: return "conv1d";
    case Op::kAtan2: return "atan2";
  }
  return "?";
}

const Tensor& Var::value() const {
  if (!valid()) throw InvalidArgument("autodiff: invalid variable");
  return tape->value(*this);
}

double Var::scalar() const {
  const Tensor& v = value();
  if (!is_scalar(v)) throw InvalidArgument("autodiff: variable is " + shape_of(v) + ", not scalar");
  return v(0, 0);
}

Tensor Gradients::of(Var v) const {
  if (!tape_ || v.tape != tape_) throw InvalidArgument("autodiff: gradient requested for a foreign variable");
  const Tensor& g = grads_.at(static_cast<std::size_t>(v.id));
  if (g.size() != 0) return g;
  const Tensor& value = tape_->value(v);
  return Tensor::Zero(value.rows(), value.cols());
}

bool Gradients::touched(Var v) const {
  return tape_ && v.tape == tape_ && grads_.at(static_cast<std::size_t>(v.id)).size() != 0;
}

void Tape::reserve(std::size_t nodes) {
  nodes_.reserve(nodes);
  inputs_.reserve(2 * nodes);
}

void Tape::check(Var v) const {
  if (v.tape != this || v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw InvalidArgument("autodiff: variable does not belong to this tape");
  }
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.first_input = static_cast<std::int32_t>(inputs_.size());
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::scalar_constant(double v) { return constant(Tensor::Constant(1, 1, v)); }

Var Tape::record(Op op, std::span<const Var> inputs, const OpParams& params) {
  if (op == Op::kLeaf) throw InvalidArgument("autodiff: use leaf() for leaves");
  const int arity = expected_arity(op);
  if (arity >= 0 && static_cast<int>(inputs.size()) != arity) {
    shape_error(op, "expects " + std::to_string(arity) + " inputs, got " + std::to_string(inputs.size()));
  }
  std::vector<const Tensor*> values;
  values.reserve(inputs.size());
  bool needs_grad = false;
  for (Var v : inputs) {
    check(v);
    values.push_back(&nodes_[static_cast<std::size_t>(v.id)].value);
    needs_grad = needs_grad || nodes_[static_cast<std::size_t>(v.id)].requires_grad;
  }
  Node n;
  n.op = op;
  n.params = params;
  n.value = evaluate(op, values, params);
  n.requires_grad = needs_grad;
  n.first_input = static_cast<std::int32_t>(inputs_.size());
  n.num_inputs = static_cast<std::int32_t>(inputs.size());
  for (Var v : inputs) inputs_.push_back(v.id);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

const Tensor& Tape::value(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.id)].value;
}

bool Tape::requires_grad(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.id)].requires_grad;
}

Op Tape::op(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.id)].op;
}

void Tape::accumulate_inputs(const Node& node, const Tensor& g, std::vector<Tensor>& grads) const {
  const auto input_id = [&](int i) { return static_cast<std::size_t>(inputs_[node.first_input + i]); };
  const auto input_node = [&](int i) -> const Node& { return nodes_[input_id(i)]; };
  const auto wants = [&](int i) { return input_node(i).requires_grad; };
  const auto push = [&](int i, const Tensor& contribution) {
    if (wants(i)) add_to(grads[input_id(i)], contribution);
  };
  const Tensor& out = node.value;

  switch (node.op) {
    case Op::kLeaf:
      return;
    case Op::kAdd:
      push(0, g);
      push(1, g);
      return;
    case Op::kSub:
      push(0, g);
      if (wants(1)) push(1, -g);
      return;
    case Op::kScale:
      if (wants(0)) push(0, node.params.scalar * g);
      return;
    case Op::kMul: {
      const Tensor& a = input_node(0).value;
      const Tensor& b = input_node(1).value;
      if (same_shape(a, b)) {
        if (wants(0)) push(0, g.cwiseProduct(b));
        if (wants(1)) push(1, g.cwiseProduct(a));
      } else if (is_scalar(b)) {
        if (wants(0)) push(0, g * b(0, 0));
        if (wants(1)) push(1, Tensor::Constant(1, 1, g.cwiseProduct(a).sum()));
      } else {
        if (wants(0)) push(0, Tensor::Constant(1, 1, g.cwiseProduct(b).sum()));
        if (wants(1)) push(1, g * a(0, 0));
      }
      return;
    }
    case Op::kMatMul: {
      const Tensor& a = input_node(0).value;
      const Tensor& b = input_node(1).value;
      if (wants(0)) push(0, g * b.transpose());
      if (wants(1)) push(1, a.transpose() * g);
      return;
    }
    case Op::kHat: {
      if (!wants(0)) return;
      Tensor d(3, 1);
      d << g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1);
      push(0, d);
      return;
    }
    case Op::kTranspose:
      if (wants(0)) push(0, g.transpose());
      return;
    case Op::kSin:
      if (wants(0)) push(0, g.cwiseProduct(input_node(0).value.array().cos().matrix()));
      return;
    case Op::kCos:
      if (wants(0)) push(0, -g.cwiseProduct(input_node(0).value.array().sin().matrix()));
      return;
    case Op::kSqrt:
      if (wants(0)) push(0, (0.5 * g.array() / out.array()).matrix());
      return;
    case Op::kReciprocal:
      if (wants(0)) push(0, (-g.array() * out.array().square()).matrix());
      return;
    case Op::kRelu:
      if (wants(0)) {
        push(0, (input_node(0).value.array() > 0.0).select(g.array(), 0.0).matrix());
      }
      return;
    case Op::kAffine: {
      const Tensor& w = input_node(0).value;
      const Tensor& x = input_node(1).value;
      const Tensor& b = input_node(2).value;
      if (wants(0)) push(0, g * x.transpose());
      if (wants(1)) push(1, w.transpose() * g);
      if (wants(2)) push(2, b.cols() == g.cols() ? g : Tensor(g.rowwise().sum()));
      return;
    }
    case Op::kSum: {
      if (!wants(0)) return;
      const Tensor& a = input_node(0).value;
      push(0, Tensor::Constant(a.rows(), a.cols(), g(0, 0)));
      return;
    }
    case Op::kHuber: {
      if (!wants(0)) return;
      const Tensor& a = input_node(0).value;
      const double delta = node.params.scalar;
      if (node.params.huber == HuberMode::kNorm) {
        const double r = a.norm();
        // ρ'(r) x / r; inside the quadratic zone that is just x.
        const double factor = r <= delta ? 1.0 : delta / r;
        push(0, (g(0, 0) * factor) * a);
      } else {
        Tensor d(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
          const double x = a.data()[i];
          d.data()[i] = g(0, 0) * (std::abs(x) <= delta ? x : (x > 0.0 ? delta : -delta));
        }
        push(0, d);
      }
      return;
    }
    case Op::kConcat: {
      Eigen::Index r = 0;
      for (int i = 0; i < node.num_inputs; ++i) {
        const Eigen::Index rows = input_node(i).value.rows();
        if (wants(i)) push(i, g.middleRows(r, rows));
        r += rows;
      }
      return;
    }
    case Op::kSlice: {
      if (!wants(0)) return;
      const Tensor& a = input_node(0).value;
      const OpParams& p = node.params;
      Tensor& slot = grads[input_id(0)];
      if (slot.size() == 0) slot = Tensor::Zero(a.rows(), a.cols());
      slot.block(p.row, p.col, p.rows, p.cols) += g;
      return;
    }
    case Op::kConv1d: {
      const Tensor& x = input_node(0).value;
      const Tensor& w = input_node(1).value;
      const Tensor& b = input_node(2).value;
      const auto shape = kernels::conv1d_shape(x, w, b, node.params.stride, node.params.padding);
      Tensor gx, gw, gb;
      kernels::conv1d_backward(x, w, g, shape, wants(0) ? &gx : nullptr, wants(1) ? &gw : nullptr,
                               wants(2) ? &gb : nullptr);
      if (wants(0)) push(0, gx);
      if (wants(1)) push(1, gw);
      if (wants(2)) push(2, gb);
      return;
    }
    case Op::kAtan2: {
      const Tensor& y = input_node(0).value;
      const Tensor& x = input_node(1).value;
      const Eigen::ArrayXXd denom = x.array().square() + y.array().square();
      if (wants(0)) push(0, (g.array() * x.array() / denom).matrix());
      if (wants(1)) push(1, (-g.array() * y.array() / denom).matrix());
      return;
    }
  }
}

Gradients Tape::backward(Var seed) const {
  check(seed);
  const Tensor& seed_value = nodes_[static_cast<std::size_t>(seed.id)].value;
  if (!is_scalar(seed_value)) {
    throw InvalidArgument("autodiff backward: seed must be scalar, got " + shape_of(seed_value));
  }
  std::vector<Tensor> grads(nodes_.size());
  grads[static_cast<std::size_t>(seed.id)] = Tensor::Ones(1, 1);
  for (std::int32_t i = seed.id; i >= 0; --i) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    const Tensor& g = grads[static_cast<std::size_t>(i)];
    if (g.size() == 0 || !node.requires_grad || node.op == Op::kLeaf) continue;
    accumulate_inputs(node, g, grads);
  }
  return Gradients(this, std::move(grads));
}

std::vector<Tensor> Tape::replay() const {
  std::vector<Tensor> values(nodes_.size());
  std::vector<const Tensor*> in;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::kLeaf) {
      values[i] = n.value;
      continue;
    }
    in.clear();
    for (int k = 0; k < n.num_inputs; ++k) in.push_back(&values[static_cast<std::size_t>(inputs_[n.first_input + k])]);
    values[i] = evaluate(n.op, in, n.params);
  }
  return values;
}

namespace {

Tape* tape_of(Var a) {
  if (!a.valid()) throw InvalidArgument("autodiff: invalid variable");
  return a.tape;
}

Var unary(Op op, Var a, const OpParams& p = {}) { return tape_of(a)->record(op, {a}, p); }
Var binary(Op op, Var a, Var b) { return tape_of(a)->record(op, {a, b}); }

}  // namespace

Var add(Var a, Var b) { return binary(Op::kAdd, a, b); }
Var sub(Var a, Var b) { return binary(Op::kSub, a, b); }

Var scale(Var a, double s) {
  OpParams p;
  p.scalar = s;
  return unary(Op::kScale, a, p);
}

Var mul(Var a, Var b) { return binary(Op::kMul, a, b); }
Var matmul(Var a, Var b) { return binary(Op::kMatMul, a, b); }
Var hat(Var a) { return unary(Op::kHat, a); }
Var transpose(Var a) { return unary(Op::kTranspose, a); }
Var sin(Var a) { return unary(Op::kSin, a); }
Var cos(Var a) { return unary(Op::kCos, a); }
Var sqrt(Var a) { return unary(Op::kSqrt, a); }
Var reciprocal(Var a) { return unary(Op::kReciprocal, a); }
Var relu(Var a) { return unary(Op::kRelu, a); }
Var affine(Var w, Var x, Var b) { return tape_of(w)->record(Op::kAffine, {w, x, b}); }
Var sum(Var a) { return unary(Op::kSum, a); }

Var huber(Var a, double delta, HuberMode mode) {
  OpParams p;
  p.scalar = delta;
  p.huber = mode;
  return unary(Op::kHuber, a, p);
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidArgument("autodiff concat: no parts");
  return tape_of(parts.front())->record(Op::kConcat, parts);
}

Var concat(std::initializer_list<Var> parts) { return concat(std::span<const Var>(parts.begin(), parts.size())); }

Var slice(Var a, int row, int col, int rows, int cols) {
  OpParams p;
  p.row = row;
  p.col = col;
  p.rows = rows;
  p.cols = cols;
  return unary(Op::kSlice, a, p);
}

Var conv1d(Var x, Var w, Var b, int stride, int padding) {
  OpParams p;
  p.stride = stride;
  p.padding = padding;
  return tape_of(x)->record(Op::kConv1d, {x, w, b}, p);
}

Var atan2(Var y, Var x) { return binary(Op::kAtan2, y, x); }

}  // namespace invio::ad
