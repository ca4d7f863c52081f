#pragma once

// The contact integrator step and the velocity-Verlet baseline step, written
// once against the engine interface (lab/engine.hpp) so ground truth, learned
// inference, and training rollouts share the exact same arithmetic.
//
// One step of the contact scheme, from (Q_n, Qdot_{n+1/2}):
//
//   Q_{n+1}     = Q_n + h * Qdot_{n+1/2}          (position drift)
//   F_{n+1}     = force(Q_{n+1})
//   Qdot^S      = Qdot_{n+1/2} + h * M^-1 F       (smooth velocity update)
//   gate        = contact gate queried at (Q_{n+1}, Qdot_{n+1/2})
//   I           = gate-scaled contact impulse built from Qdot^S
//   Qdot_{n+3/2} = Qdot^S + M^-1 I
//
// Impulses enforce the Newton restitution law on the pre-step velocities
// exactly when the gate is 1: the outgoing closing velocity is -e times the
// incoming one.  The impulse itself is applied to the smooth-updated
// velocities, I = -M_eff * (e * w_pre + w_S) along the contact normal with
// M_eff the effective mass (the body mass against a wall, the reduced mass
// for a pair), so momentum transfer is exact and the restitution law holds
// to round-off.  An optional approach guard zeroes the gate for columns
// whose bodies are separating, and optional position projection snaps
// penetrating bodies back to the contact surface on steps where an impulse
// fired.

#include <vector>

#include "lab/engine.hpp"
#include "lab/scene.hpp"

namespace lab::integ {

template <class E>
struct State {
  typename E::V Q;    // (K,B)
  typename E::V Vel;  // (K,B)
};

// Values-only step diagnostics, filled on request.
struct StepDiag {
  bool fired = false;          // some column had an effective gate above 0.5
  bool guard_blocked = false;  // a raised gate was zeroed by the approach guard
  Tensor gate;                 // effective gate after the approach guard, (1,B)
  Tensor impulse;              // generalized impulse per body, (K,B)
  Tensor lambda;  // impulse along the repulsive normal (compressive > 0), (K,B)
  Tensor v_pre;   // velocities entering the step, (K,B)
  Tensor v_smooth;  // after the force update, before impulses, (K,B)
};

// Engine-typed constants shared by every step of a rollout.
template <class E>
struct CdlContext {
  typename E::V M;     // (K,K) generalized inertia
  typename E::V Minv;  // (K,K)
  // cradle-only helpers (unset otherwise)
  typename E::V rel_row;   // (1,2) = [1, -1]: closing velocity of the pair
  typename E::V dist_col;  // (2,1) = [-mu, +mu]: impulse distribution
  typename E::V pair_rep;  // (2,1) ones: broadcast a pair gate to both rows
  typename E::V avg_pair;  // (2,2) of 0.5: midpoint position projection
};

template <class E>
CdlContext<E> make_cdl_context(E& e, const mech::SystemSpec& s) {
  CdlContext<E> ctx;
  ctx.M = e.constant(s.inertia_diag());
  ctx.Minv = e.constant(s.inv_inertia_diag());
  if (s.kind == mech::SceneKind::Cradle) {
    const double i0 = s.inertia(0), i1 = s.inertia(1);
    const double mu = i0 * i1 / (i0 + i1);
    Tensor rel(1, 2);
    rel(0, 0) = 1.0;
    rel(0, 1) = -1.0;
    ctx.rel_row = e.constant(std::move(rel));
    Tensor dist(2, 1);
    dist(0, 0) = -mu;
    dist(1, 0) = mu;
    ctx.dist_col = e.constant(std::move(dist));
    ctx.pair_rep = e.constant(Tensor::full(2, 1, 1.0));
    ctx.avg_pair = e.constant(Tensor::full(2, 2, 0.5));
  }
  return ctx;
}

namespace detail {

// Columns whose bodies are approaching (closing normal velocity > 0),
// evaluated on the raw pre-step velocities.  All-ones when the guard is off.
inline Tensor approach_mask(const mech::SystemSpec& s, const Tensor& v_pre) {
  Tensor m = Tensor::full(1, v_pre.cols, 1.0);
  if (!s.approach_guard) return m;
  for (int b = 0; b < v_pre.cols; ++b) {
    const double closing = s.kind == mech::SceneKind::Cradle
                               ? v_pre(0, b) - v_pre(1, b)
                               : -v_pre(0, b);  // ball: moving toward the floor
    m(0, b) = closing > 0.0 ? 1.0 : 0.0;
  }
  return m;
}

// Columns where an impulse actually fired and the new position penetrates.
inline Tensor projection_mask(const mech::SystemSpec& s, const Tensor& g_eff, const Tensor& q_new) {
  Tensor m = Tensor::zeros(1, q_new.cols);
  const Tensor d = mech::gap(s, q_new);
  for (int b = 0; b < q_new.cols; ++b)
    m(0, b) = (g_eff(0, b) > 0.5 && d(0, b) < 0.0) ? 1.0 : 0.0;
  return m;
}

inline bool any_above(const Tensor& t, double thr) {
  for (double x : t.data)
    if (x > thr) return true;
  return false;
}

}  // namespace detail

// One contact step.  `force(e, Q)` returns the generalized force (K,B);
// `gate(e, Q_new, V_pre, step)` returns per-body gate values in [0,1], (K,B).
// The gate is never queried for the pendulum (no contact geometry).
template <class E, class Force, class Gate>
State<E> cdl_step(E& e, const mech::SystemSpec& s, const CdlContext<E>& ctx,
                  const State<E>& st, int step, Force&& force, Gate&& gate,
                  StepDiag* diag = nullptr) {
  using V = typename E::V;
  const double h_pos = s.position_half_step ? 0.5 * s.h : s.h;

  V Qn = e.add(st.Q, e.scale(st.Vel, h_pos));
  const V F = force(e, Qn);
  V vs = e.add(st.Vel, e.matmul(ctx.Minv, e.scale(F, s.h)));

  if (diag) {
    diag->v_pre = e.value(st.Vel);
    diag->v_smooth = e.value(vs);
  }

  V vn = vs;
  Tensor g_eff_val;  // effective (1,B) gate values, for projection + diag

  if (s.kind == mech::SceneKind::Ball) {
    const V g_raw = gate(e, Qn, st.Vel, step);  // (1,B)
    const Tensor app_val = detail::approach_mask(s, e.value(st.Vel));
    const V app = e.constant(app_val);
    const V g_eff = e.hadamard(g_raw, app);
    g_eff_val = e.value(g_eff);
    // Wall impulse: with gate 1 the post velocity is exactly -e * v_pre.
    const V wall = e.sub(e.scale(st.Vel, -s.e), vs);
    vn = e.add(vs, e.hadamard(g_eff, wall));
    if (diag) {
      diag->impulse = lab::matmul(e.value(ctx.M), lab::hadamard(g_eff_val, e.value(wall)));
      diag->lambda = diag->impulse;  // repulsive normal +1
      const Tensor& raw = e.value(g_raw);
      for (int b = 0; b < raw.cols; ++b)
        if (raw(0, b) >= 0.5 && app_val(0, b) == 0.0) diag->guard_blocked = true;
    }
  } else if (s.kind == mech::SceneKind::Cradle) {
    const V g_raw = gate(e, Qn, st.Vel, step);  // (2,B)
    // Pair gate: product of the two body gates (rows extracted with constant
    // selectors), times the approach mask.
    Tensor sel0(1, 2), sel1(1, 2);
    sel0(0, 0) = 1.0;
    sel0(0, 1) = 0.0;
    sel1(0, 0) = 0.0;
    sel1(0, 1) = 1.0;
    const V row0 = e.matmul(e.constant(std::move(sel0)), g_raw);
    const V row1 = e.matmul(e.constant(std::move(sel1)), g_raw);
    const V pair_raw = e.hadamard(row0, row1);
    const Tensor app_val = detail::approach_mask(s, e.value(st.Vel));
    const V app = e.constant(app_val);
    const V g_eff = e.hadamard(pair_raw, app);
    g_eff_val = e.value(g_eff);
    // Restitution on the pre-step closing velocity, applied to the smooth
    // velocities: w = e * rel_pre + rel_smooth.
    const V rel_pre = e.matmul(ctx.rel_row, st.Vel);  // (1,B)
    const V rel_s = e.matmul(ctx.rel_row, vs);        // (1,B)
    const V w = e.add(e.scale(rel_pre, s.e), rel_s);
    const V impulse = e.matmul(ctx.dist_col, e.hadamard(g_eff, w));  // (2,B)
    vn = e.add(vs, e.matmul(ctx.Minv, impulse));
    if (diag) {
      diag->impulse = e.value(impulse);
      Tensor lam(2, diag->impulse.cols);
      for (int b = 0; b < lam.cols; ++b) {
        lam(0, b) = -diag->impulse(0, b);  // repulsive normal -1 on body 1
        lam(1, b) = diag->impulse(1, b);   // repulsive normal +1 on body 2
      }
      diag->lambda = std::move(lam);
      const Tensor& raw = e.value(pair_raw);
      for (int b = 0; b < raw.cols; ++b)
        if (raw(0, b) >= 0.5 && app_val(0, b) == 0.0) diag->guard_blocked = true;
    }
  } else {
    // Pendulum: no contact path.
    g_eff_val = Tensor::zeros(1, e.value(st.Q).cols);
    if (diag) {
      const Tensor& q = e.value(st.Q);
      diag->impulse = Tensor::zeros(q.rows, q.cols);
      diag->lambda = Tensor::zeros(q.rows, q.cols);
    }
  }

  const bool fired = detail::any_above(g_eff_val, 0.5);
  if (s.projection && fired) {
    const Tensor pmask = detail::projection_mask(s, g_eff_val, e.value(Qn));
    if (detail::any_above(pmask, 0.5)) {
      if (s.kind == mech::SceneKind::Ball) {
        const V proj = e.max_scalar(Qn, s.floor);
        Qn = e.blend(e.constant(pmask), proj, Qn);
      } else {
        const V proj = e.matmul(ctx.avg_pair, Qn);
        const V mask2 = e.matmul(ctx.pair_rep, e.constant(pmask));
        Qn = e.blend(mask2, proj, Qn);
      }
    }
  }

  if (diag) {
    diag->fired = fired;
    diag->gate = std::move(g_eff_val);
  }
  return State<E>{Qn, vn};
}

// One velocity-Verlet step on synchronous states, for the contact-free
// baseline.  `acc_cache` carries M^-1 F(Q_n) between steps; pass an
// invalid/empty value on the first call.
template <class E, class Force>
State<E> vv_step(E& e, const mech::SystemSpec& s, const CdlContext<E>& ctx,
                 const State<E>& st, Force&& force, typename E::V& acc_cache,
                 bool acc_valid) {
  using V = typename E::V;
  const double h = s.h;
  if (!acc_valid) acc_cache = e.matmul(ctx.Minv, force(e, st.Q));
  const V a0 = acc_cache;
  const V Qn = e.add(st.Q, e.add(e.scale(st.Vel, h), e.scale(a0, 0.5 * h * h)));
  const V a1 = e.matmul(ctx.Minv, force(e, Qn));
  const V vn = e.add(st.Vel, e.scale(e.add(a0, a1), 0.5 * h));
  acc_cache = a1;
  return State<E>{Qn, vn};
}

}  // namespace lab::integ
