// Physics checks for the contact integrator: hand-worked single steps,
// restitution and exchange laws, conservation across impacts, approach
// guard and projection behavior, ground-truth rollouts against closed-form
// trajectories, and second-order convergence on the smooth pendulum.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "lab/errors.hpp"
#include "lab/ground_truth.hpp"
#include "lab/rollout.hpp"
#include "lab/scene.hpp"

using namespace lab;
using namespace lab::mech;
using namespace lab::integ;

static int n_checks = 0;
static int n_failures = 0;

static void check_true(bool ok, const char* what) {
  ++n_checks;
  if (!ok) {
    ++n_failures;
    std::printf("FAIL %s\n", what);
  }
}

static void check_near(double a, double b, double tol, const char* what) {
  ++n_checks;
  if (!(std::fabs(a - b) <= tol)) {
    ++n_failures;
    std::printf("FAIL %s: %.17g vs %.17g (tol %.3g)\n", what, a, b, tol);
  }
}

using PE = PlainEngine;

static Tensor true_force_of(const SystemSpec& s, PE&, const Tensor& q) {
  return true_force(s, q);
}

// Exact contact flags, as used for ground truth.
static Tensor exact_gate(const SystemSpec& s, const Tensor& qn) {
  const Tensor d = gap(s, qn);
  Tensor g(d.rows, d.cols);
  for (std::size_t i = 0; i < d.data.size(); ++i) g.data[i] = d.data[i] <= 0.0 ? 1.0 : 0.0;
  return g;
}

static State<PE> one_step(const SystemSpec& s, const Tensor& q, const Tensor& v,
                          StepDiag* diag = nullptr) {
  PE e;
  const auto ctx = make_cdl_context(e, s);
  auto force = [&s](PE& pe, const Tensor& Q) { return true_force_of(s, pe, Q); };
  auto gate = [&s](PE&, const Tensor& qn, const Tensor&, int) { return exact_gate(s, qn); };
  return cdl_step(e, s, ctx, State<PE>{q, v}, 0, force, gate, diag);
}

static double sync_energy(const SystemSpec& s, const Trajectory& t, int i) {
  // Staggered samples: average the half-step velocities on both sides of
  // point i to estimate the synchronous velocity.
  const Tensor& va = t.states[static_cast<std::size_t>(i - 1)].Qdot;
  const Tensor& vb = t.states[static_cast<std::size_t>(i)].Qdot;
  return energy(s, t.states[static_cast<std::size_t>(i)].Q, scale(add(va, vb), 0.5));
}

static bool clean_frame(const Trajectory& t, int i) {
  // The velocity average straddles an impulse when either neighboring point
  // is in contact, so energy estimates are only meaningful away from flags.
  for (int j = i - 1; j <= i; ++j)
    for (int f : t.contacts[static_cast<std::size_t>(j)])
      if (f != 0) return false;
  return true;
}

// --- single-step hand values -------------------------------------------------

static void test_free_step_hand_values() {
  // From (q, v) = (10, 0): the position cannot move, the velocity picks up
  // one full step of gravity.
  const SystemSpec s = make_ball();
  const auto st = one_step(s, Tensor::col({10.0}), Tensor::col({0.0}));
  check_near(st.Q(0, 0), 10.0, 0.0, "ball free step: position");
  check_near(st.Vel(0, 0), -0.1962, 1e-15, "ball free step: velocity -g*h");

  // Half-step position update variant moves by h/2 * v.
  SystemSpec half = s;
  half.position_half_step = true;
  const auto st2 = one_step(half, Tensor::col({10.0}), Tensor::col({-1.0}));
  check_near(st2.Q(0, 0), 10.0 - 0.01, 1e-15, "half-step position drift");
}

static void test_wall_restitution() {
  // Hitting the floor at -5: the outgoing normal velocity is exactly -e
  // times the incoming one, independent of gravity.
  for (double e : {1.0, 0.7, 0.0}) {
    SystemSpec s = make_ball();
    s.e = e;
    StepDiag diag;
    const auto st = one_step(s, Tensor::col({0.0}), Tensor::col({-5.0}), &diag);
    check_true(diag.fired, "wall impulse fired");
    check_near(st.Vel(0, 0), 5.0 * e, 1e-12, "wall restitution -e*v_pre");
    check_true(diag.lambda(0, 0) >= 0.0, "wall impulse is compressive");
  }
}

static void test_cradle_exchange() {
  // Without gravity the exchange is exact: equal masses swap velocities.
  SystemSpec s = make_cradle();
  s.g = 0.0;
  StepDiag diag;
  const auto st = one_step(s, Tensor::col({0.0, 0.0}), Tensor::col({2.0, 0.0}), &diag);
  check_true(diag.fired, "cradle impulse fired");
  check_near(st.Vel(0, 0), 0.0, 1e-12, "exchange: left arm stops");
  check_near(st.Vel(1, 0), 2.0, 1e-12, "exchange: right arm takes the speed");
  check_true(diag.lambda(0, 0) > 0.0 && diag.lambda(1, 0) > 0.0,
             "cradle impulses are compressive");

  // With gravity on, momentum is still conserved exactly across the impulse
  // (relative to the smooth-updated velocities), and the closing velocity
  // obeys the restitution law against the pre-step velocities.
  SystemSpec sg = make_cradle();
  StepDiag dg;
  const auto stg = one_step(sg, Tensor::col({0.0, 0.0}), Tensor::col({2.0, 0.0}), &dg);
  const double p_smooth = dg.v_smooth(0, 0) + dg.v_smooth(1, 0);
  const double p_post = stg.Vel(0, 0) + stg.Vel(1, 0);
  check_near(p_post, p_smooth, 1e-12, "cradle momentum across impulse");
  const double rel_pre_g = dg.v_pre(0, 0) - dg.v_pre(1, 0);
  const double rel_post_g = stg.Vel(0, 0) - stg.Vel(1, 0);
  check_near(rel_post_g, -rel_pre_g, 1e-12, "cradle restitution law under gravity");

  // Inelastic pair: the closing velocity is scaled by -e.
  SystemSpec si = make_cradle();
  si.g = 0.0;
  si.e = 0.7;
  const auto sti = one_step(si, Tensor::col({0.0, 0.0}), Tensor::col({2.0, 0.0}));
  const double rel_post = sti.Vel(0, 0) - sti.Vel(1, 0);
  check_near(rel_post, -0.7 * 2.0, 1e-12, "cradle restitution on closing velocity");

  // Unequal masses, elastic: standard two-body result.
  SystemSpec su = make_cradle();
  su.g = 0.0;
  su.masses = {1.0, 3.0};
  const auto stu = one_step(su, Tensor::col({0.0, 0.0}), Tensor::col({2.0, 0.0}));
  check_near(stu.Vel(0, 0), -1.0, 1e-12, "unequal masses: light arm bounces back");
  check_near(stu.Vel(1, 0), 1.0, 1e-12, "unequal masses: heavy arm moves on");
}

static void test_multiplier_cross_check() {
  // The applied impulse agrees with the effective-mass multiplier form
  // I_k = -L_k * lambda_k, lambda = diag(H (e*v_pre + v_smooth) L^T),
  // with or without forces acting during the step.
  auto lam_form = [](const SystemSpec& s, const Tensor& v_pre, const Tensor& v_smooth) {
    const std::vector<int> flags(static_cast<std::size_t>(s.K), 1);
    const Tensor H = build_H(s, build_A(s, flags));
    const Tensor L = build_L(s);
    const Tensor w = add(scale(v_pre, s.e), v_smooth);
    const Tensor Hw = matmul(H, w);
    Tensor I(s.K, 1);
    for (int k = 0; k < s.K; ++k) I(k, 0) = -L(k, 0) * (Hw(k, 0) * L(k, 0));
    return I;
  };

  SystemSpec ball = make_ball();
  ball.g = 0.0;
  ball.e = 0.6;
  StepDiag db;
  one_step(ball, Tensor::col({0.0}), Tensor::col({-5.0}), &db);
  const Tensor Ib = lam_form(ball, db.v_pre, db.v_smooth);
  check_near(db.impulse(0, 0), Ib(0, 0), 1e-12, "ball impulse vs multiplier form");

  SystemSpec cr = make_cradle();
  cr.g = 0.0;
  cr.e = 0.8;
  StepDiag dc;
  one_step(cr, Tensor::col({0.0, 0.0}), Tensor::col({2.0, -1.0}), &dc);
  const Tensor Ic = lam_form(cr, dc.v_pre, dc.v_smooth);
  check_near(dc.impulse(0, 0), Ic(0, 0), 1e-12, "cradle impulse vs multiplier form, left");
  check_near(dc.impulse(1, 0), Ic(1, 0), 1e-12, "cradle impulse vs multiplier form, right");

  SystemSpec cg = make_cradle();  // gravity acts during the step
  StepDiag dcg;
  one_step(cg, Tensor::col({0.0, 0.0}), Tensor::col({2.0, 0.0}), &dcg);
  const Tensor Ig = lam_form(cg, dcg.v_pre, dcg.v_smooth);
  check_near(dcg.impulse(0, 0), Ig(0, 0), 1e-12, "gravity impulse vs multiplier form, left");
  check_near(dcg.impulse(1, 0), Ig(1, 0), 1e-12, "gravity impulse vs multiplier form, right");
}

static void test_approach_guard() {
  // Still below the floor after the drift but already separating: the guard
  // blocks the impulse, the step reduces to the smooth update, and the
  // blocked gate is recorded as a warning.
  SystemSpec s = make_ball();
  StepDiag diag;
  const auto st = one_step(s, Tensor::col({-0.05}), Tensor::col({1.0}), &diag);
  check_true(!diag.fired, "guard blocks separating contact");
  check_true(diag.guard_blocked, "blocked gate is recorded");
  check_near(st.Vel(0, 0), 1.0 - 0.1962, 1e-12, "guarded step is the smooth update");

  SystemSpec off = s;
  off.approach_guard = false;
  StepDiag diag2;
  const auto st2 = one_step(off, Tensor::col({-0.05}), Tensor::col({1.0}), &diag2);
  check_true(diag2.fired, "guard off: impulse fires on separating contact");
  check_true(!diag2.guard_blocked, "guard off records no warning");
  check_near(st2.Vel(0, 0), -1.0, 1e-12, "guard off: velocity re-flipped");
}

static void test_projection() {
  // Cradle: after a fired impulse with overlap, both arms snap to the
  // midpoint angle.
  SystemSpec s = make_cradle();
  s.g = 0.0;
  s.projection = true;
  const auto st = one_step(s, Tensor::col({-0.01, 0.01}), Tensor::col({2.0, 0.0}));
  check_near(st.Q(0, 0), 0.02, 1e-15, "projection: left arm at midpoint");
  check_near(st.Q(1, 0), 0.02, 1e-15, "projection: right arm at midpoint");

  // Ball: snapped up to the floor.
  SystemSpec b = make_ball();
  b.projection = true;
  const auto sb = one_step(b, Tensor::col({0.02}), Tensor::col({-5.0}));
  check_near(sb.Q(0, 0), 0.0, 0.0, "projection: ball clamped to the floor");

  // No impulse (guard blocks) means no projection either, even while the
  // ball is still below the floor.
  SystemSpec bg = make_ball();
  bg.projection = true;
  const auto sg = one_step(bg, Tensor::col({-0.05}), Tensor::col({1.0}));
  check_near(sg.Q(0, 0), -0.05 + 0.02 * 1.0, 1e-15, "no projection without impulse");

  // Projection off leaves the drifted position alone.
  const auto sn = one_step(make_ball(), Tensor::col({0.02}), Tensor::col({-5.0}));
  check_near(sn.Q(0, 0), 0.02 - 0.1, 1e-15, "projection off: position keeps the drift");
}

// --- ground-truth rollouts ----------------------------------------------------

static void test_ball_against_closed_form() {
  // With the half-step velocity kick the scheme reproduces constant-force
  // flight exactly, so positions match q0 - g t^2 / 2 to round-off until the
  // first bounce.
  const SystemSpec s = make_ball();
  const GroundTruth gt = generate_ground_truth(s, 100);
  const double t_impact = std::sqrt(2.0 * 10.0 / 9.81);
  bool exact = true;
  for (int n = 0; n < gt.traj.n_points(); ++n) {
    const double t = n * s.h;
    if (t >= t_impact) break;
    const double q_exact = 10.0 - 0.5 * 9.81 * t * t;
    if (std::fabs(gt.traj.states[static_cast<std::size_t>(n)].Q(0, 0) - q_exact) > 1e-9)
      exact = false;
  }
  check_true(exact, "ball flight matches the closed form to round-off");

  // First impact: event time within one step of sqrt(2 q0 / g) = 1.42784,
  // impact speed near g*t = 14.007, outgoing velocity exactly flipped (e=1).
  check_true(!gt.impulses.empty(), "ball rollout recorded an impact");
  const auto& ev = gt.impulses.front();
  check_near((ev.step + 1) * s.h, t_impact, s.h + 1e-12, "impact time");
  check_near(std::fabs(ev.v_pre[0]), 14.00704, 0.15, "impact speed");
  check_near(ev.v_post[0], -ev.v_pre[0], 1e-12, "elastic bounce flips the velocity");

  // Flags at the stored points line up with penetration.
  for (int n = 0; n < gt.traj.n_points(); ++n) {
    const auto& st = gt.traj.states[static_cast<std::size_t>(n)];
    const int want = st.Q(0, 0) <= 0.0 ? 1 : 0;
    if (gt.traj.contacts[static_cast<std::size_t>(n)][0] != want) {
      check_true(false, "ball contact flags match the stored gap");
      return;
    }
  }
  check_true(true, "ball contact flags match the stored gap");
}

static void test_ball_kkt_clean() {
  const SystemSpec s = make_ball();
  const GroundTruth gt = generate_ground_truth(s, 500);
  const KktReport rep = check_kkt(s, gt);
  check_true(rep.n_events >= 3, "repeated bounces recorded");
  check_true(rep.clean(), "ball impulses satisfy the complementarity checks");
  // Without projection the ball may overshoot the floor by at most one
  // step's travel at impact speed.
  check_true(rep.max_penetration < 0.3, "penetration bounded by one step of travel");

  // The staggered bounce reflects the synchronous velocity at an unchanged
  // position, so for the constant-force ball the energy at every clean frame
  // equals the initial energy to round-off.
  const double e0 = energy(s, Tensor::col(s.q0), Tensor::col(s.v0));
  double worst = 0.0;
  for (int n = 1; n < gt.traj.n_points(); ++n) {
    if (!clean_frame(gt.traj, n)) continue;
    worst = std::max(worst, std::fabs(sync_energy(s, gt.traj, n) - e0));
  }
  check_true(worst < 1e-9 * e0, "bounce energy stays at the initial energy");
}

static void test_pendulum_period_and_energy() {
  // Small oscillations: period 2*pi*sqrt(l/g) = 2.00607 s.
  SystemSpec s = make_pendulum();
  s.q0 = {0.1};
  const GroundTruth gt = generate_ground_truth(s, 5000);
  std::vector<double> crossings;
  for (int n = 1; n < gt.traj.n_points(); ++n) {
    const double a = gt.traj.states[static_cast<std::size_t>(n - 1)].Q(0, 0);
    const double b = gt.traj.states[static_cast<std::size_t>(n)].Q(0, 0);
    if (a > 0.0 && b <= 0.0) {
      // linear interpolation of the downward crossing time
      crossings.push_back(((n - 1) + a / (a - b)) * s.h);
      if (crossings.size() == 11) break;
    }
  }
  check_true(crossings.size() == 11, "collected pendulum crossings");
  if (crossings.size() == 11) {
    const double period = (crossings.back() - crossings.front()) / 10.0;
    // Finite amplitude (0.1 rad) stretches the small-angle period by ~0.06%.
    check_near(period, 2.0 * std::numbers::pi / std::sqrt(9.81), 2e-3,
               "small-angle pendulum period");
  }

  // Energy measured with synchronized velocities stays within a tight band
  // (symplectic schemes bound the oscillation instead of drifting).
  SystemSpec big = make_pendulum();  // full default amplitude, 1 rad
  const GroundTruth gb = generate_ground_truth(big, 5000);
  const double e0 = sync_energy(big, gb.traj, 1);
  double worst = 0.0;
  for (int n = 1; n < gb.traj.n_points(); ++n)
    worst = std::max(worst, std::fabs(sync_energy(big, gb.traj, n) - e0));
  check_true(worst < 1e-3 * e0, "pendulum energy bounded over 5000 steps");
}

static void test_cradle_rollout() {
  const SystemSpec s = make_cradle();
  const GroundTruth gt = generate_ground_truth(s, 2000);
  const KktReport rep = check_kkt(s, gt);
  check_true(rep.n_events >= 3, "repeated exchanges recorded");
  check_true(rep.clean(), "cradle impulses satisfy the complementarity checks");
  check_near(rep.max_penetration, 0.0, 1e-12, "projection removes interpenetration");

  // The very first transition exchanges the arms' velocities: exact
  // restitution against the pre-step closing speed, exact momentum against
  // the smooth update, and nearly all the speed handed to the right arm.
  check_true(!gt.impulses.empty() && gt.impulses.front().step == 0,
             "initial touching contact fires immediately");
  const auto& ev = gt.impulses.front();
  check_near(ev.v_post[0] - ev.v_post[1], -(ev.v_pre[0] - ev.v_pre[1]), 1e-12,
             "first exchange obeys the restitution law");
  check_near(ev.v_post[0] + ev.v_post[1], ev.v_smooth[0] + ev.v_smooth[1], 1e-12,
             "first exchange conserves momentum");
  check_near(ev.v_post[0], 0.0, 0.01, "left arm nearly stops");
  check_near(ev.v_post[1], 2.0, 0.01, "right arm takes nearly all the speed");

  // Exchanges strand a small O(h) overlap each event, so the energy drifts
  // upward slightly; it must stay inside a small band around the initial
  // energy. The estimate is only valid away from contact frames.
  const double e0 = energy(s, Tensor::col(s.q0), Tensor::col(s.v0));
  double worst = 0.0;
  double e_last = e0;
  for (int n = 1; n < gt.traj.n_points(); ++n) {
    if (!clean_frame(gt.traj, n)) continue;
    e_last = sync_energy(s, gt.traj, n);
    worst = std::max(worst, std::fabs(e_last - e0));
  }
  check_true(worst < 0.02 * e0, "cradle energy bounded over 2000 steps");
  check_true(e_last > e0, "stranded overlap injects (not dissipates) energy");
}

static void test_convergence_order() {
  // Smooth problem (pendulum before any contact): halving h divides the
  // position error at a fixed time by about four.
  auto q_at = [](double h, double t_end) {
    SystemSpec s = make_pendulum();
    s.h = h;
    const int steps = static_cast<int>(std::lround(t_end / h));
    const GroundTruth gt = generate_ground_truth(s, steps);
    return gt.traj.states.back().Q(0, 0);
  };
  const double t_end = 1.0;
  const double q_ref = q_at(0.0004, t_end);
  const double err_h = std::fabs(q_at(0.02, t_end) - q_ref);
  const double err_h2 = std::fabs(q_at(0.01, t_end) - q_ref);
  const double ratio = err_h / err_h2;
  check_true(ratio > 3.0 && ratio < 5.0, "pendulum error ratio near 4");

  // Constant-force flight is integrated exactly, so the ball shows round-off
  // instead of an h^2 error before the first bounce.
  SystemSpec ball = make_ball();
  ball.h = 0.01;
  const GroundTruth fine = generate_ground_truth(ball, 50);
  const double t = 50 * 0.01;
  check_near(fine.traj.states.back().Q(0, 0), 10.0 - 0.5 * 9.81 * t * t, 1e-10,
             "ball flight exact at h/2 as well");
}

static void test_determinism_and_divergence() {
  const SystemSpec s = make_cradle();
  const GroundTruth a = generate_ground_truth(s, 500);
  const GroundTruth b = generate_ground_truth(s, 500);
  bool same = a.traj.n_points() == b.traj.n_points();
  for (int n = 0; same && n < a.traj.n_points(); ++n) {
    same = a.traj.states[static_cast<std::size_t>(n)].Q.data ==
               b.traj.states[static_cast<std::size_t>(n)].Q.data &&
           a.traj.states[static_cast<std::size_t>(n)].Qdot.data ==
               b.traj.states[static_cast<std::size_t>(n)].Qdot.data;
  }
  check_true(same, "ground truth is bitwise deterministic");

  // A runaway force blows the rollout up; it truncates and flags itself.
  PlainEngine e;
  SystemSpec p = make_pendulum();
  const auto ctx = make_cdl_context(e, p);
  auto bad_force = [](PlainEngine&, const Tensor& q) { return scale(q, 1e4); };
  auto no_gate = [](PlainEngine&, const Tensor& qn, const Tensor&, int) {
    return Tensor::zeros(qn.rows, qn.cols);
  };
  const auto roll = cdl_rollout(e, p, ctx, Tensor::col({1.0}), Tensor::col({0.0}), 200,
                                bad_force, no_gate);
  check_true(roll.diverged, "runaway rollout flags divergence");
  check_true(roll.n_points() < 201, "runaway rollout truncates");

  // Ground truth turns the same condition into an error.
  SystemSpec huge = make_ball();
  huge.h = 1e3;
  bool threw = false;
  try {
    generate_ground_truth(huge, 50);
  } catch (const NumericalError&) {
    threw = true;
  }
  check_true(threw, "ground truth reports blow-up as an error");
}

static void test_velocity_verlet() {
  // Constant force: velocity Verlet reproduces the parabola exactly.
  PlainEngine e;
  SystemSpec ball = make_ball();
  const auto ctx = make_cdl_context(e, ball);
  auto force = [&ball](PlainEngine& pe, const Tensor& q) { return true_force_of(ball, pe, q); };
  const auto roll = vv_rollout(e, ball, ctx, Tensor::col({10.0}), Tensor::col({0.0}), 60, force);
  check_true(!roll.diverged, "velocity Verlet ball rollout completes");
  for (int n = 0; n < roll.n_points(); ++n) {
    const double t = n * ball.h;
    const double q_exact = 10.0 - 0.5 * 9.81 * t * t;
    if (std::fabs(e.value(roll.Q[static_cast<std::size_t>(n)])(0, 0) - q_exact) > 1e-9) {
      check_true(false, "velocity Verlet exact on constant force");
      return;
    }
    // Synchronous velocities: v = -g t exactly.
    if (std::fabs(e.value(roll.Vel[static_cast<std::size_t>(n)])(0, 0) + 9.81 * t) > 1e-9) {
      check_true(false, "velocity Verlet synchronous velocities exact");
      return;
    }
  }
  check_true(true, "velocity Verlet exact on constant force");

  // Pendulum: energy stays in a band (velocities are synchronous here, no
  // averaging needed).
  SystemSpec pend = make_pendulum();
  const auto ctx2 = make_cdl_context(e, pend);
  auto force2 = [&pend](PlainEngine& pe, const Tensor& q) { return true_force_of(pend, pe, q); };
  const auto roll2 =
      vv_rollout(e, pend, ctx2, Tensor::col({1.0}), Tensor::col({0.0}), 5000, force2);
  const double e0 = energy(pend, e.value(roll2.Q[0]), e.value(roll2.Vel[0]));
  double worst = 0.0;
  for (int n = 0; n < roll2.n_points(); ++n) {
    const double en = energy(pend, e.value(roll2.Q[static_cast<std::size_t>(n)]),
                             e.value(roll2.Vel[static_cast<std::size_t>(n)]));
    worst = std::max(worst, std::fabs(en - e0));
  }
  check_true(worst < 1e-3 * e0, "velocity Verlet pendulum energy bounded");
}

static void test_batched_columns_match_single() {
  // A batched rollout advances each column exactly as the corresponding
  // single-column rollout.
  const SystemSpec s = make_ball();
  PlainEngine e;
  const auto ctx = make_cdl_context(e, s);
  auto force = [&s](PlainEngine& pe, const Tensor& q) { return true_force_of(s, pe, q); };
  auto gate = [&s](PlainEngine&, const Tensor& qn, const Tensor&, int) {
    return exact_gate(s, qn);
  };

  Tensor Q0 = Tensor::from_rows(1, 3, {10.0, 2.0, 0.5});
  Tensor V0 = Tensor::from_rows(1, 3, {0.0, -3.0, 1.0});
  const auto batch = cdl_rollout(e, s, ctx, Q0, V0, 120, force, gate);

  for (int b = 0; b < 3; ++b) {
    const auto single = cdl_rollout(e, s, ctx, Tensor::col({Q0(0, b)}),
                                    Tensor::col({V0(0, b)}), 120, force, gate);
    bool same = true;
    for (int n = 0; n < batch.n_points(); ++n) {
      if (batch.Q[static_cast<std::size_t>(n)](0, b) !=
              single.Q[static_cast<std::size_t>(n)](0, 0) ||
          batch.Vel[static_cast<std::size_t>(n)](0, b) !=
              single.Vel[static_cast<std::size_t>(n)](0, 0))
        same = false;
    }
    check_true(same, "batched column matches single rollout bitwise");
  }
}

int main() {
  test_free_step_hand_values();
  test_wall_restitution();
  test_cradle_exchange();
  test_multiplier_cross_check();
  test_approach_guard();
  test_projection();
  test_ball_against_closed_form();
  test_ball_kkt_clean();
  test_pendulum_period_and_energy();
  test_cradle_rollout();
  test_convergence_order();
  test_determinism_and_divergence();
  test_velocity_verlet();
  test_batched_columns_match_single();

  std::printf("%d checks, %d failures\n", n_checks, n_failures);
  return n_failures == 0 ? 0 : 1;
}
