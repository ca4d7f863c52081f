#include "lab/ground_truth.hpp"

#include <string>

#include "lab/errors.hpp"
#include "lab/rollout.hpp"

namespace lab::mech {

namespace {

std::vector<double> column0(const Tensor& t) {
  std::vector<double> out(static_cast<std::size_t>(t.rows));
  for (int r = 0; r < t.rows; ++r) out[static_cast<std::size_t>(r)] = t(r, 0);
  return out;
}

}  // namespace

GroundTruth generate_ground_truth(const SystemSpec& spec, int n_steps) {
  spec.validate();
  if (n_steps < 0) throw ConfigError("ground truth: n_steps must be >= 0");

  integ::PlainEngine e;
  const auto ctx = integ::make_cdl_context(e, spec);

  const Tensor Q0 = Tensor::col(spec.q0);
  const Tensor V0 = Tensor::col(spec.v0);
  // Staggered start: half-step kick onto the velocity grid.
  const Tensor Vhalf =
      add(V0, scale(matmul(spec.inv_inertia_diag(), true_force(spec, Q0)), 0.5 * spec.h));

  auto force = [&spec](integ::PlainEngine&, const Tensor& Q) { return true_force(spec, Q); };
  auto gate = [&spec](integ::PlainEngine&, const Tensor& Qn, const Tensor&, int) {
    const Tensor d = gap(spec, Qn);
    Tensor g(d.rows, d.cols);
    for (std::size_t i = 0; i < d.data.size(); ++i) g.data[i] = d.data[i] <= 0.0 ? 1.0 : 0.0;
    return g;
  };

  auto roll = integ::cdl_rollout(e, spec, ctx, Q0, Vhalf, n_steps, force, gate,
                                 /*want_diag=*/true);
  if (roll.diverged)
    throw NumericalError("ground truth diverged at step " + std::to_string(roll.n_points()));

  GroundTruth gt;
  gt.traj.h = spec.h;
  gt.traj.sigma = 0.0;
  gt.traj.seed = 0;
  for (int i = 0; i < roll.n_points(); ++i) {
    StaggeredState s;
    s.Q = roll.Q[static_cast<std::size_t>(i)];
    s.Qdot = roll.Vel[static_cast<std::size_t>(i)];
    gt.traj.contacts.push_back(contact_flags(spec, s.Q));
    gt.traj.states.push_back(std::move(s));
  }
  for (int n = 0; n < static_cast<int>(roll.diags.size()); ++n) {
    const auto& d = roll.diags[static_cast<std::size_t>(n)];
    if (!d.fired) continue;
    ImpulseEvent ev;
    ev.step = n;
    ev.flags = gt.traj.contacts[static_cast<std::size_t>(n + 1)];
    ev.impulse = column0(d.impulse);
    ev.lambda = column0(d.lambda);
    ev.v_pre = column0(d.v_pre);
    ev.v_smooth = column0(d.v_smooth);
    ev.v_post = column0(roll.Vel[static_cast<std::size_t>(n + 1)]);
    gt.impulses.push_back(std::move(ev));
  }
  return gt;
}

KktReport check_kkt(const SystemSpec& spec, const GroundTruth& gt) {
  KktReport rep;
  rep.n_events = static_cast<int>(gt.impulses.size());
  for (const auto& st : gt.traj.states) {
    const Tensor d = gap(spec, st.Q);
    for (double x : d.data)
      if (-x > rep.max_penetration) rep.max_penetration = -x;
  }
  for (const auto& ev : gt.impulses) {
    bool any_flag = false;
    for (std::size_t k = 0; k < ev.lambda.size(); ++k) {
      if (ev.flags[k]) any_flag = true;
      if (ev.lambda[k] < rep.min_lambda) rep.min_lambda = ev.lambda[k];
      if (ev.lambda[k] < -1e-12)
        rep.violations.push_back("step " + std::to_string(ev.step) + ": lambda[" +
                                 std::to_string(k) + "] = " + std::to_string(ev.lambda[k]) +
                                 " < 0");
    }
    if (!any_flag)
      rep.violations.push_back("step " + std::to_string(ev.step) +
                               ": impulse fired without contact flags");
  }
  return rep;
}

}  // namespace lab::mech
