#include "lab/tape.hpp"

#include <stdexcept>
#include <string>

namespace lab::ad {

DiffValue Tape::push(Node&& n) {
  nodes_.push_back(std::move(n));
  return DiffValue{static_cast<int32_t>(nodes_.size() - 1)};
}

const Node& Tape::node(DiffValue v) const {
  if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size())
    throw std::logic_error("lab::ad: dangling DiffValue handle");
  return nodes_[v.id];
}

Node& Tape::mut(DiffValue v) { return const_cast<Node&>(node(v)); }

DiffValue Tape::constant(Tensor v) {
  Node n;
  n.op = Op::ConstLeaf;
  n.val = std::move(v);
  return push(std::move(n));
}

DiffValue Tape::param(const Tensor& stored, bool trainable) {
  Node n;
  n.op = Op::ParamLeaf;
  n.view = &stored;
  n.requires_grad = trainable;
  return push(std::move(n));
}

const Tensor& Tape::grad(DiffValue v) const {
  const Node& n = node(v);
  if (!n.has_grad) throw std::logic_error("lab::ad: gradient not populated; run backward() first");
  return n.grad;
}

Tensor Tape::grad_or_zeros(DiffValue v) const {
  const Node& n = node(v);
  if (n.has_grad) return n.grad;
  return Tensor::zeros(n.value().rows, n.value().cols);
}

Tensor& Tape::ensure_grad(int32_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    const Tensor& v = n.value();
    n.grad = Tensor::zeros(v.rows, v.cols);
    n.has_grad = true;
  }
  return n.grad;
}

namespace {

// Common wiring for a unary/binary/ternary op: value computed eagerly,
// requires_grad is the OR over inputs.
Node make(Op op, const Tape& t, DiffValue a, DiffValue b = {}, DiffValue c = {}) {
  Node n;
  n.op = op;
  n.a = a.id;
  n.b = b.id;
  n.c = c.id;
  n.requires_grad = (a.valid() && t.requires_grad(a)) || (b.valid() && t.requires_grad(b)) ||
                    (c.valid() && t.requires_grad(c));
  return n;
}

}  // namespace

DiffValue add(Tape& t, DiffValue a, DiffValue b) {
  Node n = make(Op::Add, t, a, b);
  n.val = lab::add(t.val(a), t.val(b));
  return t.push(std::move(n));
}

DiffValue sub(Tape& t, DiffValue a, DiffValue b) {
  Node n = make(Op::Sub, t, a, b);
  n.val = lab::sub(t.val(a), t.val(b));
  return t.push(std::move(n));
}

DiffValue neg(Tape& t, DiffValue a) {
  Node n = make(Op::Neg, t, a);
  n.val = lab::neg(t.val(a));
  return t.push(std::move(n));
}

DiffValue hadamard(Tape& t, DiffValue a, DiffValue b) {
  Node n = make(Op::Hadamard, t, a, b);
  n.val = lab::hadamard(t.val(a), t.val(b));
  return t.push(std::move(n));
}

DiffValue scale(Tape& t, DiffValue a, double c) {
  Node n = make(Op::Scale, t, a);
  n.s0 = c;
  n.val = lab::scale(t.val(a), c);
  return t.push(std::move(n));
}

DiffValue matmul(Tape& t, DiffValue a, DiffValue b) {
  Node n = make(Op::MatMul, t, a, b);
  n.val = lab::matmul(t.val(a), t.val(b));
  return t.push(std::move(n));
}

DiffValue matmul_tn(Tape& t, DiffValue a, DiffValue b) {
  Node n = make(Op::MatMulTN, t, a, b);
  n.val = lab::matmul_tn(t.val(a), t.val(b));
  return t.push(std::move(n));
}

DiffValue add_col(Tape& t, DiffValue a, DiffValue col) {
  Node n = make(Op::AddCol, t, a, col);
  n.val = lab::add_col(t.val(a), t.val(col));
  return t.push(std::move(n));
}

DiffValue vstack(Tape& t, DiffValue a, DiffValue b) {
  Node n = make(Op::VStack, t, a, b);
  n.val = lab::vstack(t.val(a), t.val(b));
  return t.push(std::move(n));
}

DiffValue tanh(Tape& t, DiffValue a) {
  Node n = make(Op::Tanh, t, a);
  n.val = lab::tanh_ew(t.val(a));
  return t.push(std::move(n));
}

DiffValue sigmoid(Tape& t, DiffValue a) {
  Node n = make(Op::Sigmoid, t, a);
  n.val = lab::sigmoid_ew(t.val(a));
  return t.push(std::move(n));
}

DiffValue sin(Tape& t, DiffValue a) {
  Node n = make(Op::Sin, t, a);
  n.val = lab::sin_ew(t.val(a));
  return t.push(std::move(n));
}

DiffValue log(Tape& t, DiffValue a) {
  Node n = make(Op::Log, t, a);
  n.val = lab::log_ew(t.val(a));
  return t.push(std::move(n));
}

DiffValue clamp(Tape& t, DiffValue a, double lo, double hi) {
  Node n = make(Op::Clamp, t, a);
  n.s0 = lo;
  n.s1 = hi;
  n.val = lab::clamp_ew(t.val(a), lo, hi);
  return t.push(std::move(n));
}

DiffValue max_scalar(Tape& t, DiffValue a, double c) {
  Node n = make(Op::MaxScalar, t, a);
  n.s0 = c;
  n.val = lab::max_scalar_ew(t.val(a), c);
  return t.push(std::move(n));
}

DiffValue blend(Tape& t, DiffValue mask, DiffValue a, DiffValue b) {
  // mask is a gating coefficient in [0,1]; no adjoint flows into it.  Values:
  // mask⊙a + (1−mask)⊙b.
  Node n = make(Op::Blend, t, a, b);
  n.c = mask.id;
  const Tensor& m = t.val(mask);
  n.val = lab::add(lab::hadamard(m, t.val(a)),
                   lab::hadamard(lab::sub(Tensor::full(m.rows, m.cols, 1.0), m), t.val(b)));
  return t.push(std::move(n));
}

DiffValue sum_all(Tape& t, DiffValue a) {
  Node n = make(Op::SumAll, t, a);
  n.val = Tensor::scalar(lab::sum_all(t.val(a)));
  return t.push(std::move(n));
}

void Tape::backward(DiffValue root) {
  Node& r = mut(root);
  if (!r.value().is_scalar())
    throw std::logic_error("lab::ad::backward: root must be a (1,1) scalar, got " +
                           r.value().shape_str());
  if (!r.requires_grad) return;  // nothing on the tape depends on parameters
  ensure_grad(root.id);
  nodes_[root.id].grad.data[0] += 1.0;

  for (int32_t i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.requires_grad) continue;
    if (n.op == Op::ConstLeaf || n.op == Op::ParamLeaf) continue;
    const Tensor& g = n.grad;
    const bool ga = n.a >= 0 && nodes_[n.a].requires_grad;
    const bool gb = n.b >= 0 && nodes_[n.b].requires_grad;

    switch (n.op) {
      case Op::Add:
        if (ga) acc(ensure_grad(n.a), g);
        if (gb) acc(ensure_grad(n.b), g);
        break;
      case Op::Sub:
        if (ga) acc(ensure_grad(n.a), g);
        if (gb) acc_scaled(ensure_grad(n.b), g, -1.0);
        break;
      case Op::Neg:
        if (ga) acc_scaled(ensure_grad(n.a), g, -1.0);
        break;
      case Op::Hadamard:
        if (ga) acc_hadamard(ensure_grad(n.a), g, nodes_[n.b].value());
        if (gb) acc_hadamard(ensure_grad(n.b), g, nodes_[n.a].value());
        break;
      case Op::Scale:
        if (ga) acc_scaled(ensure_grad(n.a), g, n.s0);
        break;
      case Op::MatMul:
        // y = a·b  →  da += g·bᵀ, db += aᵀ·g
        if (ga) acc_matmul_nt(ensure_grad(n.a), g, nodes_[n.b].value());
        if (gb) acc_matmul_tn(ensure_grad(n.b), nodes_[n.a].value(), g);
        break;
      case Op::MatMulTN:
        // y = aᵀ·b  →  da += b·gᵀ, db += a·g
        if (ga) acc_matmul_nt(ensure_grad(n.a), nodes_[n.b].value(), g);
        if (gb) acc_matmul(ensure_grad(n.b), nodes_[n.a].value(), g);
        break;
      case Op::AddCol:
        if (ga) acc(ensure_grad(n.a), g);
        if (gb) acc(ensure_grad(n.b), row_sums(g));
        break;
      case Op::VStack:
        if (ga) acc(ensure_grad(n.a), top_rows(g, nodes_[n.a].value().rows));
        if (gb) acc(ensure_grad(n.b), bottom_rows(g, nodes_[n.b].value().rows));
        break;
      case Op::Tanh:
        if (ga) acc_tanh_bwd(ensure_grad(n.a), g, n.val);
        break;
      case Op::Sigmoid:
        if (ga) acc_sigmoid_bwd(ensure_grad(n.a), g, n.val);
        break;
      case Op::Sin:
        if (ga) acc_cos_mul(ensure_grad(n.a), g, nodes_[n.a].value());
        break;
      case Op::Log:
        if (ga) acc_div(ensure_grad(n.a), g, nodes_[n.a].value());
        break;
      case Op::Clamp:
        if (ga) acc_mask_open(ensure_grad(n.a), g, nodes_[n.a].value(), n.s0, n.s1);
        break;
      case Op::MaxScalar:
        if (ga) acc_mask_ge(ensure_grad(n.a), g, nodes_[n.a].value(), n.s0);
        break;
      case Op::Blend: {
        const Tensor& mask = nodes_[n.c].value();
        if (ga) acc_hadamard(ensure_grad(n.a), g, mask);
        if (gb) {
          Tensor gm = lab::hadamard(g, mask);
          Tensor& db = ensure_grad(n.b);
          acc(db, g);
          acc_scaled(db, gm, -1.0);
        }
        break;
      }
      case Op::SumAll:
        if (ga) acc_const(ensure_grad(n.a), g.data[0]);
        break;
      case Op::ConstLeaf:
      case Op::ParamLeaf:
        break;
    }
  }
}

}  // namespace lab::ad
