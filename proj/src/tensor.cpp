#include "lab/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace lab {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;
using AMap = Eigen::Map<Eigen::ArrayXd>;
using CAMap = Eigen::Map<const Eigen::ArrayXd>;

namespace {
CMap m(const Tensor& t) { return CMap(t.data.data(), t.rows, t.cols); }
Map m(Tensor& t) { return Map(t.data.data(), t.rows, t.cols); }
CAMap arr(const Tensor& t) { return CAMap(t.data.data(), t.size()); }
AMap arr(Tensor& t) { return AMap(t.data.data(), t.size()); }
}  // namespace

Tensor::Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
  if (r < 0 || c < 0) throw std::invalid_argument("lab::Tensor: negative shape");
}

Tensor Tensor::zeros(int r, int c) { return Tensor(r, c); }

Tensor Tensor::full(int r, int c, double v) {
  Tensor t(r, c);
  std::fill(t.data.begin(), t.data.end(), v);
  return t;
}

Tensor Tensor::scalar(double v) { return full(1, 1, v); }

Tensor Tensor::col(const std::vector<double>& v) {
  Tensor t(static_cast<int>(v.size()), 1);
  t.data.assign(v.begin(), v.end());
  return t;
}

Tensor Tensor::from_rows(int r, int c, std::initializer_list<double> v) {
  if (static_cast<int>(v.size()) != r * c)
    throw std::invalid_argument("lab::Tensor::from_rows: initialiser size mismatch");
  Tensor t(r, c);
  std::copy(v.begin(), v.end(), t.data.begin());
  return t;
}

double& Tensor::operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
double Tensor::operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

std::string Tensor::shape_str() const {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string("lab::") + op + ": shape mismatch " + a.shape_str() +
                              " vs " + b.shape_str());
}

namespace {
void require_same(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error(op, a, b);
}
}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same("add", a, b);
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a) + arr(b);
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same("sub", a, b);
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a) - arr(b);
  return out;
}

Tensor neg(const Tensor& a) {
  Tensor out(a.rows, a.cols);
  arr(out) = -arr(a);
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same("hadamard", a, b);
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a) * arr(b);
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a) * c;
  return out;
}

Tensor tanh_ew(const Tensor& a) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a).tanh();
  return out;
}

Tensor sigmoid_ew(const Tensor& a) {
  // 1/(1+exp(-x)) evaluated from the non-overflowing side of 0.
  Tensor out(a.rows, a.cols);
  auto x = arr(a);
  arr(out) = (x >= 0.0)
                 .select(1.0 / (1.0 + (-x).exp()), x.exp() / (1.0 + x.exp()));
  return out;
}

Tensor sin_ew(const Tensor& a) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a).sin();
  return out;
}

Tensor cos_ew(const Tensor& a) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a).cos();
  return out;
}

Tensor log_ew(const Tensor& a) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a).log();
  return out;
}

Tensor clamp_ew(const Tensor& a, double lo, double hi) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a).max(lo).min(hi);
  return out;
}

Tensor max_scalar_ew(const Tensor& a, double c) {
  Tensor out(a.rows, a.cols);
  arr(out) = arr(a).max(c);
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows) shape_error("matmul", a, b);
  Tensor out(a.rows, b.cols);
  m(out).noalias() = m(a) * m(b);
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows != b.rows) shape_error("matmul_tn", a, b);
  Tensor out(a.cols, b.cols);
  m(out).noalias() = m(a).transpose() * m(b);
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols, a.rows);
  m(out) = m(a).transpose();
  return out;
}

void acc(Tensor& dst, const Tensor& src) {
  require_same("acc", dst, src);
  arr(dst) += arr(src);
}

void acc_const(Tensor& dst, double v) { arr(dst) += v; }

void acc_scaled(Tensor& dst, const Tensor& src, double c) {
  require_same("acc_scaled", dst, src);
  arr(dst) += arr(src) * c;
}

void acc_hadamard(Tensor& dst, const Tensor& a, const Tensor& b) {
  require_same("acc_hadamard", dst, a);
  require_same("acc_hadamard", a, b);
  arr(dst) += arr(a) * arr(b);
}

void acc_matmul(Tensor& dst, const Tensor& a, const Tensor& b) {
  if (a.cols != b.rows || dst.rows != a.rows || dst.cols != b.cols)
    shape_error("acc_matmul", a, b);
  m(dst).noalias() += m(a) * m(b);
}

void acc_matmul_nt(Tensor& dst, const Tensor& a, const Tensor& b) {
  if (a.cols != b.cols || dst.rows != a.rows || dst.cols != b.rows)
    shape_error("acc_matmul_nt", a, b);
  m(dst).noalias() += m(a) * m(b).transpose();
}

void acc_matmul_tn(Tensor& dst, const Tensor& a, const Tensor& b) {
  if (a.rows != b.rows || dst.rows != a.cols || dst.cols != b.cols)
    shape_error("acc_matmul_tn", a, b);
  m(dst).noalias() += m(a).transpose() * m(b);
}

void acc_tanh_bwd(Tensor& dst, const Tensor& g, const Tensor& y) {
  require_same("acc_tanh_bwd", dst, g);
  arr(dst) += arr(g) * (1.0 - arr(y) * arr(y));
}

void acc_sigmoid_bwd(Tensor& dst, const Tensor& g, const Tensor& y) {
  require_same("acc_sigmoid_bwd", dst, g);
  arr(dst) += arr(g) * arr(y) * (1.0 - arr(y));
}

void acc_cos_mul(Tensor& dst, const Tensor& g, const Tensor& x) {
  require_same("acc_cos_mul", dst, g);
  arr(dst) += arr(g) * arr(x).cos();
}

void acc_div(Tensor& dst, const Tensor& g, const Tensor& x) {
  require_same("acc_div", dst, g);
  arr(dst) += arr(g) / arr(x);
}

void acc_mask_open(Tensor& dst, const Tensor& g, const Tensor& x, double lo, double hi) {
  require_same("acc_mask_open", dst, g);
  arr(dst) += (arr(x) > lo && arr(x) < hi).select(arr(g), 0.0);
}

void acc_mask_ge(Tensor& dst, const Tensor& g, const Tensor& x, double c) {
  require_same("acc_mask_ge", dst, g);
  arr(dst) += (arr(x) >= c).select(arr(g), 0.0);
}

Tensor vstack(const Tensor& a, const Tensor& b) {
  if (a.cols != b.cols) shape_error("vstack", a, b);
  Tensor out(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

Tensor add_col(const Tensor& a, const Tensor& c) {
  if (c.cols != 1 || c.rows != a.rows) shape_error("add_col", a, c);
  Tensor out(a.rows, a.cols);
  m(out) = m(a).colwise() + Eigen::Map<const Eigen::VectorXd>(c.data.data(), c.rows);
  return out;
}

Tensor row_sums(const Tensor& a) {
  Tensor out(a.rows, 1);
  Eigen::Map<Eigen::VectorXd>(out.data.data(), out.rows) = m(a).rowwise().sum();
  return out;
}

Tensor rep_row(const Tensor& r, int rows) {
  if (r.rows != 1) throw std::invalid_argument("lab::rep_row: expected a row vector");
  Tensor out(rows, r.cols);
  for (int i = 0; i < rows; ++i)
    std::copy(r.data.begin(), r.data.end(), out.data.begin() + static_cast<size_t>(i) * r.cols);
  return out;
}

Tensor top_rows(const Tensor& a, int rows) {
  if (rows < 0 || rows > a.rows) throw std::invalid_argument("lab::top_rows: bad row count");
  Tensor out(rows, a.cols);
  std::copy(a.data.begin(), a.data.begin() + static_cast<size_t>(rows) * a.cols, out.data.begin());
  return out;
}

Tensor bottom_rows(const Tensor& a, int rows) {
  if (rows < 0 || rows > a.rows) throw std::invalid_argument("lab::bottom_rows: bad row count");
  Tensor out(rows, a.cols);
  std::copy(a.data.end() - static_cast<size_t>(rows) * a.cols, a.data.end(), out.data.begin());
  return out;
}

double sum_all(const Tensor& a) { return arr(a).sum(); }

double max_abs(const Tensor& a) { return a.size() == 0 ? 0.0 : arr(a).abs().maxCoeff(); }

bool all_finite(const Tensor& a) { return arr(a).isFinite().all(); }

}  // namespace lab
