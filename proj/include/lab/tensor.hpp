#pragma once

// Dense row-major 64-bit float matrices plus the small kernel set the
// autodiff tape and the integrators are built from.  Vectors are (n,1)
// matrices and scalars are (1,1); there is no implicit broadcasting —
// the few broadcast-like operations that are actually needed (bias add,
// row replication) exist as named kernels.

#include <cstddef>
#include <initializer_list>
#include <new>
#include <string>
#include <vector>

namespace lab {

// 64-byte-aligned storage.  Uniform buffer alignment keeps vectorized
// reductions bitwise reproducible: the SIMD peeling split depends on the
// pointer's alignment, so heap-layout differences between otherwise identical
// runs would perturb sums in the last bit.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(alignment)));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, std::align_val_t(alignment));
  }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using AlignedDoubles = std::vector<double, AlignedAllocator<double>>;

struct Tensor {
  int rows = 0;
  int cols = 0;
  AlignedDoubles data;  // row-major, rows*cols entries

  Tensor() = default;
  Tensor(int r, int c);

  static Tensor zeros(int r, int c);
  static Tensor full(int r, int c, double v);
  static Tensor scalar(double v);
  static Tensor col(const std::vector<double>& v);          // (n,1)
  static Tensor from_rows(int r, int c, std::initializer_list<double> v);

  double& operator()(int r, int c);
  double operator()(int r, int c) const;

  int size() const { return rows * cols; }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  std::string shape_str() const;
};

// Shape-contract failure helper: every kernel names itself in the message.
[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b);

// elementwise ----------------------------------------------------------------
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor tanh_ew(const Tensor& a);
Tensor sigmoid_ew(const Tensor& a);
Tensor sin_ew(const Tensor& a);
Tensor cos_ew(const Tensor& a);
Tensor log_ew(const Tensor& a);
Tensor clamp_ew(const Tensor& a, double lo, double hi);
Tensor max_scalar_ew(const Tensor& a, double c);

// products -------------------------------------------------------------------
Tensor matmul(const Tensor& a, const Tensor& b);     // a(m,k) * b(k,n)
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // aᵀ * b,  a(m,n), b(m,p)
Tensor transpose(const Tensor& a);

// accumulating kernels used by the backward sweep ----------------------------
void acc(Tensor& dst, const Tensor& src);                         // dst += src
void acc_const(Tensor& dst, double v);                            // dst += v
void acc_scaled(Tensor& dst, const Tensor& src, double c);        // dst += c*src
void acc_hadamard(Tensor& dst, const Tensor& a, const Tensor& b); // dst += a⊙b
void acc_matmul(Tensor& dst, const Tensor& a, const Tensor& b);   // dst += a*b
void acc_matmul_nt(Tensor& dst, const Tensor& a, const Tensor& b);// dst += a*bᵀ
void acc_matmul_tn(Tensor& dst, const Tensor& a, const Tensor& b);// dst += aᵀ*b

// fused chain-rule accumulators (g = upstream adjoint) -------------------------
void acc_tanh_bwd(Tensor& dst, const Tensor& g, const Tensor& y);     // dst += g⊙(1−y²)
void acc_sigmoid_bwd(Tensor& dst, const Tensor& g, const Tensor& y);  // dst += g⊙y⊙(1−y)
void acc_cos_mul(Tensor& dst, const Tensor& g, const Tensor& x);      // dst += g⊙cos(x)
void acc_div(Tensor& dst, const Tensor& g, const Tensor& x);          // dst += g⊘x
void acc_mask_open(Tensor& dst, const Tensor& g, const Tensor& x, double lo, double hi);
void acc_mask_ge(Tensor& dst, const Tensor& g, const Tensor& x, double c);

// structure ------------------------------------------------------------------
Tensor vstack(const Tensor& a, const Tensor& b);      // rows of a over rows of b
Tensor add_col(const Tensor& a, const Tensor& c);     // a(m,n) + c(m,1) to every column
Tensor row_sums(const Tensor& a);                     // (m,1)
Tensor rep_row(const Tensor& r, int m);               // r(1,n) replicated to (m,n)
Tensor top_rows(const Tensor& a, int m);
Tensor bottom_rows(const Tensor& a, int m);

// reductions / queries --------------------------------------------------------
double sum_all(const Tensor& a);
double max_abs(const Tensor& a);
bool all_finite(const Tensor& a);

}  // namespace lab
