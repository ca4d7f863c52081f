#pragma once

// Two interchangeable arithmetic engines for the integrators.  PlainEngine
// computes on raw tensors (ground truth, fast inference); TapeEngine records
// identical operations on an autodiff tape (training).  Both execute the same
// kernel sequence, so a plain rollout and a tape rollout from the same inputs
// agree bit for bit.

#include "lab/tape.hpp"
#include "lab/tensor.hpp"

namespace lab::integ {

struct PlainEngine {
  using V = Tensor;

  static const Tensor& value(const V& v) { return v; }
  V constant(Tensor t) const { return t; }

  V add(const V& a, const V& b) const { return lab::add(a, b); }
  V sub(const V& a, const V& b) const { return lab::sub(a, b); }
  V neg(const V& a) const { return lab::neg(a); }
  V hadamard(const V& a, const V& b) const { return lab::hadamard(a, b); }
  V scale(const V& a, double c) const { return lab::scale(a, c); }
  V matmul(const V& a, const V& b) const { return lab::matmul(a, b); }
  V max_scalar(const V& a, double c) const { return lab::max_scalar_ew(a, c); }

  V blend(const V& mask, const V& a, const V& b) const {
    if (!mask.same_shape(a) || !a.same_shape(b)) shape_error("blend", a, b);
    Tensor out(a.rows, a.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] = mask.data[i] * a.data[i] + (1.0 - mask.data[i]) * b.data[i];
    return out;
  }
};

struct TapeEngine {
  ad::Tape* tape = nullptr;
  using V = ad::DiffValue;

  explicit TapeEngine(ad::Tape& t) : tape(&t) {}

  const Tensor& value(V v) const { return tape->val(v); }
  V constant(Tensor t) const { return tape->constant(std::move(t)); }

  V add(V a, V b) const { return ad::add(*tape, a, b); }
  V sub(V a, V b) const { return ad::sub(*tape, a, b); }
  V neg(V a) const { return ad::neg(*tape, a); }
  V hadamard(V a, V b) const { return ad::hadamard(*tape, a, b); }
  V scale(V a, double c) const { return ad::scale(*tape, a, c); }
  V matmul(V a, V b) const { return ad::matmul(*tape, a, b); }
  V max_scalar(V a, double c) const { return ad::max_scalar(*tape, a, c); }
  V blend(V mask, V a, V b) const { return ad::blend(*tape, mask, a, b); }
};

}  // namespace lab::integ
