#pragma once

// Reverse-mode automatic differentiation over Tensor values.
//
// The tape is eager: every operation computes its value immediately and
// records one node.  backward() runs a single reverse sweep from a scalar
// root, accumulating adjoints into every node that requires gradients.
//
// Second-order use: the MLP input gradient (lab/mlp.hpp) is constructed out
// of these same primitives — the backward pass of the network is recorded
// forward as tape operations — so a later backward() through a rollout that
// consumed that gradient differentiates through it with no special cases.
//
// Nodes live in a deque, so values and adjoints are stable under later op
// creation; handles (DiffValue) are indices and stay valid until clear().

#include <cstdint>
#include <deque>

#include "lab/tensor.hpp"

namespace lab::ad {

struct DiffValue {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

enum class Op : std::uint8_t {
  ConstLeaf,
  ParamLeaf,
  Add,
  Sub,
  Neg,
  Hadamard,
  Scale,      // s0 * a
  MatMul,     // a(m,k) · b(k,n)
  MatMulTN,   // aᵀ · b
  AddCol,     // a(m,n) + b(m,1) per column
  VStack,     // rows of a over rows of b
  Tanh,
  Sigmoid,
  Sin,
  Log,
  Clamp,      // clamp to [s0, s1]; adjoint passes on the open interval
  MaxScalar,  // max(a, s0); adjoint passes where a >= s0
  Blend,      // c⊙a + (1−c)⊙b with mask c (no adjoint into c)
  SumAll,     // (1,1)
};

struct Node {
  Op op = Op::ConstLeaf;
  bool requires_grad = false;
  bool has_grad = false;
  int32_t a = -1, b = -1, c = -1;
  double s0 = 0.0, s1 = 0.0;
  Tensor val;                       // owned value (unused for ParamLeaf)
  const Tensor* view = nullptr;     // ParamLeaf: borrowed storage
  Tensor grad;                      // allocated on first accumulation

  const Tensor& value() const { return view ? *view : val; }
};

class Tape {
 public:
  // Leaves.  A param leaf borrows its tensor: the owner must outlive the tape
  // contents (ParamStore entries are stable between clear() calls).
  DiffValue constant(Tensor v);
  DiffValue param(const Tensor& stored, bool trainable = true);

  const Tensor& val(DiffValue v) const { return node(v).value(); }
  bool requires_grad(DiffValue v) const { return node(v).requires_grad; }
  bool has_grad(DiffValue v) const { return node(v).has_grad; }
  const Tensor& grad(DiffValue v) const;
  Tensor grad_or_zeros(DiffValue v) const;

  // Reverse sweep from a scalar root; adjoint of the root is 1.
  void backward(DiffValue root);

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

  // Used by the op builders below; not part of the user-facing surface.
  DiffValue push(Node&& n);
  const Node& node(DiffValue v) const;

 private:
  Node& mut(DiffValue v);
  Tensor& ensure_grad(int32_t id);
  std::deque<Node> nodes_;
};

// Op builders -----------------------------------------------------------------
DiffValue add(Tape& t, DiffValue a, DiffValue b);
DiffValue sub(Tape& t, DiffValue a, DiffValue b);
DiffValue neg(Tape& t, DiffValue a);
DiffValue hadamard(Tape& t, DiffValue a, DiffValue b);
DiffValue scale(Tape& t, DiffValue a, double c);
DiffValue matmul(Tape& t, DiffValue a, DiffValue b);
DiffValue matmul_tn(Tape& t, DiffValue a, DiffValue b);
DiffValue add_col(Tape& t, DiffValue a, DiffValue col);
DiffValue vstack(Tape& t, DiffValue a, DiffValue b);
DiffValue tanh(Tape& t, DiffValue a);
DiffValue sigmoid(Tape& t, DiffValue a);
DiffValue sin(Tape& t, DiffValue a);
DiffValue log(Tape& t, DiffValue a);
DiffValue clamp(Tape& t, DiffValue a, double lo, double hi);
DiffValue max_scalar(Tape& t, DiffValue a, double c);
DiffValue blend(Tape& t, DiffValue mask, DiffValue a, DiffValue b);
DiffValue sum_all(Tape& t, DiffValue a);

}  // namespace lab::ad
