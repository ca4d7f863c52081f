#include "lab/losses.hpp"

#include <cmath>

#include "lab/errors.hpp"

namespace lab::train {

namespace {

constexpr double kProbFloor = 1e-7;

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ConfigError(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

double loss_trajectory(const std::vector<Tensor>& pred, const std::vector<Tensor>& observed) {
  if (pred.empty() || pred.size() != observed.size()) {
    throw ConfigError("loss_trajectory: sequences must be non-empty and equally long");
  }
  double sq = 0.0;
  long terms = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    require_same_shape(pred[i], observed[i], "loss_trajectory");
    for (std::size_t j = 0; j < pred[i].data.size(); ++j) {
      const double d = pred[i].data[j] - observed[i].data[j];
      sq += d * d;
      ++terms;
    }
  }
  return sq / static_cast<double>(terms);
}

double loss_trajectory(const mech::Trajectory& pred, const mech::Trajectory& observed) {
  const int n = pred.n_points();
  if (n == 0 || n != observed.n_points()) {
    throw ConfigError("loss_trajectory: trajectories must be non-empty and equally long");
  }
  double sq = 0.0;
  long terms = 0;
  for (int i = 0; i < n; ++i) {
    const auto& a = pred.states[i];
    const auto& b = observed.states[i];
    require_same_shape(a.Q, b.Q, "loss_trajectory");
    for (int k = 0; k < a.Q.rows; ++k) {
      const double dq = a.Q(k, 0) - b.Q(k, 0);
      const double dv = a.Qdot(k, 0) - b.Qdot(k, 0);
      sq += dq * dq + dv * dv;
      terms += 2;
    }
  }
  return sq / static_cast<double>(terms);
}

double loss_contact(const Tensor& probs, const Tensor& flags) {
  require_same_shape(probs, flags, "loss_contact");
  double total = 0.0;
  for (int i = 0; i < probs.rows; ++i) {
    for (int j = 0; j < probs.cols; ++j) {
      double p = probs(i, j);
      p = std::min(std::max(p, kProbFloor), 1.0 - kProbFloor);
      const double c = flags(i, j);
      total += c * std::log(p) + (1.0 - c) * std::log(1.0 - p);
    }
  }
  return -total / static_cast<double>(probs.rows * probs.cols);
}

namespace {

// sum_all((pred - target)^2) as tape ops.
ad::DiffValue sq_err_tape(ad::Tape& t, ad::DiffValue pred, const Tensor& target) {
  const ad::DiffValue d = ad::sub(t, pred, t.constant(target));
  return ad::sum_all(t, ad::hadamard(t, d, d));
}

}  // namespace

ad::DiffValue loss_trajectory_tape(ad::Tape& t, const std::vector<ad::DiffValue>& pred_q,
                                   const std::vector<ad::DiffValue>& pred_v,
                                   const std::vector<Tensor>& obs_q,
                                   const std::vector<Tensor>& obs_v) {
  const std::size_t n = pred_q.size();
  if (n < 2 || pred_v.size() != n || obs_q.size() != n || obs_v.size() != n) {
    throw ConfigError("loss_trajectory_tape: need >= 2 aligned points");
  }
  ad::DiffValue sq = sq_err_tape(t, pred_q[1], obs_q[1]);
  sq = ad::add(t, sq, sq_err_tape(t, pred_v[1], obs_v[1]));
  for (std::size_t i = 2; i < n; ++i) {
    sq = ad::add(t, sq, sq_err_tape(t, pred_q[i], obs_q[i]));
    sq = ad::add(t, sq, sq_err_tape(t, pred_v[i], obs_v[i]));
  }
  const Tensor& q0 = obs_q[0];
  const double terms = static_cast<double>(n) * 2.0 * static_cast<double>(q0.rows) *
                       static_cast<double>(q0.cols);
  return ad::scale(t, sq, 1.0 / terms);
}

ad::DiffValue loss_trajectory_tape(ad::Tape& t, const std::vector<ad::DiffValue>& pred_s,
                                   const std::vector<Tensor>& obs_s) {
  const std::size_t n = pred_s.size();
  if (n < 2 || obs_s.size() != n) {
    throw ConfigError("loss_trajectory_tape: need >= 2 aligned points");
  }
  ad::DiffValue sq = sq_err_tape(t, pred_s[1], obs_s[1]);
  for (std::size_t i = 2; i < n; ++i) {
    sq = ad::add(t, sq, sq_err_tape(t, pred_s[i], obs_s[i]));
  }
  const double terms = static_cast<double>(n) * static_cast<double>(obs_s[0].rows) *
                       static_cast<double>(obs_s[0].cols);
  return ad::scale(t, sq, 1.0 / terms);
}

ad::DiffValue loss_contact_tape(ad::Tape& t, ad::DiffValue probs, const Tensor& flags) {
  const Tensor& pv = t.val(probs);
  require_same_shape(pv, flags, "loss_contact_tape");
  const ad::DiffValue p = ad::clamp(t, probs, kProbFloor, 1.0 - kProbFloor);
  const ad::DiffValue one_minus_p =
      ad::sub(t, t.constant(Tensor::full(pv.rows, pv.cols, 1.0)), p);
  Tensor one_minus_c = flags;
  for (int i = 0; i < one_minus_c.rows; ++i) {
    for (int j = 0; j < one_minus_c.cols; ++j) one_minus_c(i, j) = 1.0 - flags(i, j);
  }
  ad::DiffValue hit = ad::hadamard(t, t.constant(flags), ad::log(t, p));
  ad::DiffValue miss = ad::hadamard(t, t.constant(one_minus_c), ad::log(t, one_minus_p));
  ad::DiffValue total = ad::sum_all(t, ad::add(t, hit, miss));
  return ad::scale(t, total, -1.0 / static_cast<double>(pv.rows * pv.cols));
}

ad::DiffValue loss_reg_tape(ad::Tape& t, const std::vector<ad::DiffValue>& theta,
                            const ad::MlpSpec& spec, double lambda) {
  if (static_cast<int>(theta.size()) != 2 * spec.n_layers()) {
    throw ConfigError("loss_reg_tape: lease does not match the network spec");
  }
  if (lambda == 0.0) return t.constant(Tensor::zeros(1, 1));
  ad::DiffValue sq{-1};
  for (int layer = 0; layer < spec.n_layers(); ++layer) {
    const ad::DiffValue w = theta[2 * layer];
    const ad::DiffValue term = ad::sum_all(t, ad::hadamard(t, w, w));
    sq = layer == 0 ? term : ad::add(t, sq, term);
  }
  return ad::scale(t, sq, lambda);
}

}  // namespace lab::train
