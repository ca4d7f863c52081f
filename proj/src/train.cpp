#include "lab/train.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <utility>

#include "lab/adam.hpp"
#include "lab/errors.hpp"
#include "lab/losses.hpp"
#include "lab/rng.hpp"
#include "lab/scene.hpp"

namespace lab::train {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("TrainConfig: lr must be positive");
  if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
  if (horizon < 2) throw ConfigError("TrainConfig: horizon must be >= 2");
  if (batch < 1) throw ConfigError("TrainConfig: batch must be >= 1");
  if (lambda_reg < 0.0) throw ConfigError("TrainConfig: lambda_reg must be >= 0");
}

std::vector<std::vector<WindowRef>> make_batches(const mech::Dataset& ds, int horizon, int batch,
                                                 std::uint64_t seed, int epoch) {
  if (horizon < 2) throw ConfigError("make_batches: horizon must be >= 2");
  if (batch < 1) throw ConfigError("make_batches: batch must be >= 1");
  if (ds.windows.empty()) throw ConfigError("make_batches: dataset has no windows");

  std::vector<WindowRef> refs;
  for (int w = 0; w < static_cast<int>(ds.windows.size()); ++w) {
    const int len = ds.windows[w].n_points();
    if (len < horizon) {
      throw ConfigError("make_batches: window shorter than the training horizon");
    }
    for (int s = 0; s + horizon <= len; s += horizon) refs.push_back({w, s});
  }

  // Fisher-Yates over a splitmix64 stream keeps the shuffle identical across
  // standard libraries and platforms.
  std::uint64_t state = mix_seed(seed, 0xB47C85ull + static_cast<std::uint64_t>(epoch));
  for (int i = static_cast<int>(refs.size()) - 1; i > 0; --i) {
    state = splitmix64(state);
    const int j = static_cast<int>(state % static_cast<std::uint64_t>(i + 1));
    std::swap(refs[i], refs[j]);
  }

  std::vector<std::vector<WindowRef>> batches;
  for (std::size_t at = 0; at < refs.size(); at += static_cast<std::size_t>(batch)) {
    const std::size_t end = std::min(refs.size(), at + static_cast<std::size_t>(batch));
    batches.emplace_back(refs.begin() + static_cast<std::ptrdiff_t>(at),
                         refs.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

namespace {

void require_same_scene(const mech::SystemSpec& model_scene, const mech::SystemSpec& data_scene) {
  if (model_scene.to_json() != data_scene.to_json()) {
    throw ConfigError("train: dataset scene differs from the model scene");
  }
}

// Slices of a batch packed into (K,B) column tensors, one per window point.
// The stacked gate_* tensors pair each point n+1's position with the velocity
// stored on point n — exactly the (Q_{n+1}, Qdot_{n+1/2}) pairing the rollout
// queries the contact network with, so supervision and inference agree even
// at impulse points, where the two velocity grids differ by the exchange.
struct StaggeredBatch {
  Tensor Q0, V0;
  std::vector<Tensor> obs_q, obs_v;  // horizon points
  std::vector<Tensor> gate_flags;    // horizon-1 points; entry n = flags at point n+1
  Tensor gate_q, gate_v, gate_c;     // (K, B*(horizon-1)) stacked gate queries
};

StaggeredBatch pack_staggered(const mech::Dataset& ds, const std::vector<WindowRef>& refs,
                              int horizon) {
  const int K = ds.spec.K;
  const int B = static_cast<int>(refs.size());
  StaggeredBatch b;
  b.obs_q.assign(horizon, Tensor::zeros(K, B));
  b.obs_v.assign(horizon, Tensor::zeros(K, B));
  b.gate_flags.assign(horizon - 1, Tensor::zeros(K, B));
  b.gate_q = Tensor::zeros(K, B * (horizon - 1));
  b.gate_v = Tensor::zeros(K, B * (horizon - 1));
  b.gate_c = Tensor::zeros(K, B * (horizon - 1));
  for (int i = 0; i < B; ++i) {
    const mech::Trajectory& tr = ds.windows[refs[i].window];
    const int start = refs[i].start;
    for (int n = 0; n < horizon; ++n) {
      const mech::StaggeredState& st = tr.states[start + n];
      for (int k = 0; k < K; ++k) {
        b.obs_q[n](k, i) = st.Q(k, 0);
        b.obs_v[n](k, i) = st.Qdot(k, 0);
      }
    }
    for (int n = 0; n + 1 < horizon; ++n) {
      const int col = i * (horizon - 1) + n;
      const mech::StaggeredState& cur = tr.states[start + n];
      const mech::StaggeredState& nxt = tr.states[start + n + 1];
      for (int k = 0; k < K; ++k) {
        b.gate_flags[n](k, i) = static_cast<double>(tr.contacts[start + n + 1][k]);
        b.gate_q(k, col) = nxt.Q(k, 0);
        b.gate_v(k, col) = cur.Qdot(k, 0);
        b.gate_c(k, col) = static_cast<double>(tr.contacts[start + n + 1][k]);
      }
    }
  }
  b.Q0 = b.obs_q[0];
  b.V0 = b.obs_v[0];
  return b;
}

// Residual-chain view of the same slices: stacked states plus the flag pairs
// the contact head trains on (input point n -> flags at point n+1).
struct StackedBatch {
  Tensor s0, c0;
  std::vector<Tensor> obs_s;     // horizon points, (2K,B)
  std::vector<Tensor> in_flags;  // horizon-1 points; entry n = flags at point n
  Tensor head_x, head_c;         // (2K, B*(horizon-1)), (K, B*(horizon-1))
};

StackedBatch pack_stacked(const mech::Dataset& ds, const std::vector<WindowRef>& refs,
                          int horizon) {
  const int K = ds.spec.K;
  const int B = static_cast<int>(refs.size());
  StackedBatch b;
  b.obs_s.assign(horizon, Tensor::zeros(2 * K, B));
  b.in_flags.assign(horizon - 1, Tensor::zeros(K, B));
  b.c0 = Tensor::zeros(K, B);
  b.head_x = Tensor::zeros(2 * K, B * (horizon - 1));
  b.head_c = Tensor::zeros(K, B * (horizon - 1));
  for (int i = 0; i < B; ++i) {
    const mech::Trajectory& tr = ds.windows[refs[i].window];
    const int start = refs[i].start;
    for (int n = 0; n < horizon; ++n) {
      const mech::StaggeredState& st = tr.states[start + n];
      for (int k = 0; k < K; ++k) {
        b.obs_s[n](k, i) = st.Q(k, 0);
        b.obs_s[n](K + k, i) = st.Qdot(k, 0);
      }
    }
    for (int k = 0; k < K; ++k) b.c0(k, i) = static_cast<double>(tr.contacts[start][k]);
    for (int n = 0; n + 1 < horizon; ++n) {
      const int col = i * (horizon - 1) + n;
      for (int k = 0; k < K; ++k) {
        b.in_flags[n](k, i) = static_cast<double>(tr.contacts[start + n][k]);
        b.head_x(k, col) = b.obs_s[n](k, i);
        b.head_x(K + k, col) = b.obs_s[n](K + k, i);
        b.head_c(k, col) = static_cast<double>(tr.contacts[start + n + 1][k]);
      }
    }
  }
  b.s0 = b.obs_s[0];
  return b;
}

void apply_adam(ad::Tape& t, ad::ParamStore& store, const std::vector<ad::DiffValue>& theta,
                double lr) {
  std::vector<Tensor> grads;
  grads.reserve(theta.size());
  for (const ad::DiffValue v : theta) grads.push_back(t.grad_or_zeros(v));
  ad::adam_step(store, grads, ad::AdamConfig{lr});
}

using BatchFn = std::function<std::optional<EpochLoss>(const std::vector<WindowRef>&)>;
using Snapshot = std::vector<ad::ParamStore>;

RunReport run_epochs(const mech::Dataset& ds, const TrainConfig& cfg, const BatchFn& do_batch,
                     const std::function<Snapshot()>& save,
                     const std::function<void(const Snapshot&)>& restore) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  Snapshot good = save();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = make_batches(ds, cfg.horizon, cfg.batch, cfg.seed, epoch);
    EpochLoss sum;
    int done = 0;
    bool failed = false;
    for (const auto& refs : batches) {
      std::optional<EpochLoss> loss;
      try {
        loss = do_batch(refs);
      } catch (const NumericalError&) {
        loss.reset();
      }
      if (!loss) {
        failed = true;
        break;
      }
      sum.t += loss->t;
      sum.c += loss->c;
      sum.r += loss->r;
      ++done;
    }
    if (failed) {
      restore(good);
      rep.aborted = true;
      break;
    }
    const double nb = static_cast<double>(done);
    rep.losses.push_back({sum.t / nb, sum.c / nb, sum.r / nb});
    rep.completed_epochs = epoch + 1;
    good = save();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

RunReport train(models::CdlModel& m, const mech::Dataset& ds, const TrainConfig& cfg) {
  require_same_scene(m.scene, ds.spec);
  const bool teacher = cfg.touch && cfg.teacher_forcing;
  const BatchFn do_batch = [&](const std::vector<WindowRef>& refs) -> std::optional<EpochLoss> {
    const StaggeredBatch b = pack_staggered(ds, refs, cfg.horizon);
    ad::Tape t;
    const auto th_pot = ad::lease(t, m.pot);
    const auto th_con = ad::lease(t, m.con);
    models::GateSource gates;
    if (teacher) {
      gates.recorded = &b.gate_flags;
    } else {
      gates.soft = true;
    }
    const auto roll =
        models::cdl_rollout_tape(t, m, th_pot, th_con, b.Q0, b.V0, cfg.horizon - 1, gates);
    if (roll.diverged) return std::nullopt;
    const ad::DiffValue lt = loss_trajectory_tape(t, roll.Q, roll.Vel, b.obs_q, b.obs_v);
    ad::DiffValue total = lt;
    double c_val = 0.0;
    if (cfg.touch) {
      const ad::DiffValue probs = models::contact_probs_tape(t, m.con_spec, th_con,
                                                             t.constant(b.gate_q),
                                                             t.constant(b.gate_v));
      const ad::DiffValue lc = loss_contact_tape(t, probs, b.gate_c);
      total = ad::add(t, total, lc);
      c_val = t.val(lc)(0, 0);
    }
    const ad::DiffValue lreg = loss_reg_tape(t, th_pot, m.pot_spec, cfg.lambda_reg);
    total = ad::add(t, total, lreg);
    const double t_val = t.val(lt)(0, 0);
    const double r_val = t.val(lreg)(0, 0);
    if (!std::isfinite(t_val + c_val + r_val)) return std::nullopt;
    t.backward(total);
    apply_adam(t, m.pot, th_pot, cfg.lr);
    apply_adam(t, m.con, th_con, cfg.lr);
    return EpochLoss{t_val, c_val, r_val};
  };
  return run_epochs(
      ds, cfg, do_batch, [&] { return Snapshot{m.pot, m.con}; },
      [&](const Snapshot& s) {
        m.pot = s[0];
        m.con = s[1];
      });
}

RunReport train(models::ResNetModel& m, const mech::Dataset& ds, const TrainConfig& cfg) {
  require_same_scene(m.scene, ds.spec);
  const bool teacher = m.contact_aware && cfg.touch && cfg.teacher_forcing;
  const BatchFn do_batch = [&](const std::vector<WindowRef>& refs) -> std::optional<EpochLoss> {
    const StackedBatch b = pack_stacked(ds, refs, cfg.horizon);
    ad::Tape t;
    const auto th_net = ad::lease(t, m.net);
    const auto th_head = ad::lease(t, m.head);
    const std::vector<Tensor>* recorded = teacher ? &b.in_flags : nullptr;
    const Tensor* c0 = (m.contact_aware && !teacher) ? &b.c0 : nullptr;
    const auto roll =
        models::resnet_rollout_tape(t, m, th_net, th_head, b.s0, cfg.horizon - 1, recorded, c0);
    if (roll.diverged) return std::nullopt;
    const ad::DiffValue lt = loss_trajectory_tape(t, roll.s, b.obs_s);
    ad::DiffValue total = lt;
    double c_val = 0.0;
    if (m.contact_aware && cfg.touch) {
      const auto head = ad::mlp_forward(t, m.head_spec, th_head, t.constant(b.head_x));
      const ad::DiffValue lc = loss_contact_tape(t, head.y, b.head_c);
      total = ad::add(t, total, lc);
      c_val = t.val(lc)(0, 0);
    }
    const double t_val = t.val(lt)(0, 0);
    if (!std::isfinite(t_val + c_val)) return std::nullopt;
    t.backward(total);
    apply_adam(t, m.net, th_net, cfg.lr);
    apply_adam(t, m.head, th_head, cfg.lr);
    return EpochLoss{t_val, c_val, 0.0};
  };
  return run_epochs(
      ds, cfg, do_batch, [&] { return Snapshot{m.net, m.head}; },
      [&](const Snapshot& s) {
        m.net = s[0];
        m.head = s[1];
      });
}

RunReport train(models::VinModel& m, const mech::Dataset& ds, const TrainConfig& cfg) {
  require_same_scene(m.scene, ds.spec);
  const BatchFn do_batch = [&](const std::vector<WindowRef>& refs) -> std::optional<EpochLoss> {
    const StaggeredBatch b = pack_staggered(ds, refs, cfg.horizon);
    ad::Tape t;
    const auto th_pot = ad::lease(t, m.pot);
    const auto roll = models::vin_rollout_tape(t, m, th_pot, b.Q0, b.V0, cfg.horizon - 1);
    if (roll.diverged) return std::nullopt;
    const ad::DiffValue lt = loss_trajectory_tape(t, roll.Q, roll.Vel, b.obs_q, b.obs_v);
    const ad::DiffValue lreg = loss_reg_tape(t, th_pot, m.pot_spec, cfg.lambda_reg);
    const ad::DiffValue total = ad::add(t, lt, lreg);
    const double t_val = t.val(lt)(0, 0);
    const double r_val = t.val(lreg)(0, 0);
    if (!std::isfinite(t_val + r_val)) return std::nullopt;
    t.backward(total);
    apply_adam(t, m.pot, th_pot, cfg.lr);
    return EpochLoss{t_val, 0.0, r_val};
  };
  return run_epochs(
      ds, cfg, do_batch, [&] { return Snapshot{m.pot}; },
      [&](const Snapshot& s) { m.pot = s[0]; });
}

Forecaster forecaster_for(const models::CdlModel& m) {
  return [m](const mech::StaggeredState& y0, const mech::ContactSignal& c0, int n_steps) {
    return models::cdl_forecast(m, y0, c0, n_steps);
  };
}

Forecaster forecaster_for(const models::ResNetModel& m) {
  return [m](const mech::StaggeredState& y0, const mech::ContactSignal& c0, int n_steps) {
    return models::resnet_forecast(m, y0, c0, n_steps);
  };
}

Forecaster forecaster_for(const models::VinModel& m) {
  return [m](const mech::StaggeredState& y0, const mech::ContactSignal&, int n_steps) {
    return models::vin_forecast(m, y0, n_steps);
  };
}

EvalReport evaluate(const Forecaster& fc, const mech::SystemSpec& scene,
                    const std::vector<mech::Trajectory>& test_windows, double sigma_noisy,
                    std::uint64_t noise_seed) {
  if (test_windows.empty()) throw ConfigError("evaluate: no test windows");
  EvalReport rep;
  double sq = 0.0;
  double sq_noisy = 0.0;
  long terms = 0;
  long flags_right = 0;
  long flags_total = 0;
  for (std::size_t w = 0; w < test_windows.size(); ++w) {
    const mech::Trajectory& ref = test_windows[w];
    if (ref.n_points() < 2) throw ConfigError("evaluate: test window needs >= 2 points");
    const mech::Trajectory pred = fc(ref.states[0], ref.contacts[0], ref.n_points() - 1);
    if (pred.n_points() < ref.n_points()) rep.diverged = true;
    const int n = std::min(pred.n_points(), ref.n_points());
    std::mt19937_64 gen(mix_seed(noise_seed, w));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < scene.K; ++k) {
        const double dq = pred.states[i].Q(k, 0) - ref.states[i].Q(k, 0);
        const double dv = pred.states[i].Qdot(k, 0) - ref.states[i].Qdot(k, 0);
        sq += dq * dq + dv * dv;
        const double nq = dq - sigma_noisy * gauss(gen);
        const double nv = dv - sigma_noisy * gauss(gen);
        sq_noisy += nq * nq + nv * nv;
        terms += 2;
      }
      if (i > 0) {
        for (int k = 0; k < scene.K; ++k) {
          ++flags_total;
          if (pred.contacts[i][k] == ref.contacts[i][k]) ++flags_right;
        }
      }
    }
    if (w == 0) {
      rep.energy.reserve(static_cast<std::size_t>(pred.n_points()));
      for (int i = 0; i < pred.n_points(); ++i) {
        rep.energy.push_back(mech::energy(scene, pred.states[i].Q, pred.states[i].Qdot));
      }
    }
  }
  rep.rmse = std::sqrt(sq / static_cast<double>(terms));
  rep.rmse_noisy = std::sqrt(sq_noisy / static_cast<double>(terms));
  rep.contact_accuracy =
      flags_total > 0 ? static_cast<double>(flags_right) / static_cast<double>(flags_total) : 1.0;
  return rep;
}

}  // namespace lab::train
