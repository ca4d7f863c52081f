#pragma once

#include <vector>

#include "lab/step.hpp"

namespace lab::integ {

// A rolled-out trajectory in engine values.  Q and Vel hold n_points entries
// (the initial state plus one per completed step).  When a state exceeds the
// blow-up threshold or turns non-finite, the rollout stops early and flags
// itself; the offending state is not appended.
template <class E>
struct Rollout {
  std::vector<typename E::V> Q;
  std::vector<typename E::V> Vel;
  std::vector<StepDiag> diags;  // one per completed step when requested
  bool diverged = false;

  int n_points() const { return static_cast<int>(Q.size()); }
};

namespace detail {

inline bool state_ok(const Tensor& q, const Tensor& v, double blow_up) {
  return all_finite(q) && all_finite(v) && max_abs(q) < blow_up && max_abs(v) < blow_up;
}

}  // namespace detail

template <class E, class Force, class Gate>
Rollout<E> cdl_rollout(E& e, const mech::SystemSpec& s, const CdlContext<E>& ctx,
                       typename E::V Q0, typename E::V V0, int n_steps,
                       Force&& force, Gate&& gate, bool want_diag = false,
                       double blow_up = 1e6) {
  Rollout<E> out;
  out.Q.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.Vel.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.Q.push_back(Q0);
  out.Vel.push_back(V0);
  State<E> st{Q0, V0};
  for (int n = 0; n < n_steps; ++n) {
    StepDiag diag;
    State<E> next = cdl_step(e, s, ctx, st, n, force, gate, want_diag ? &diag : nullptr);
    if (!detail::state_ok(e.value(next.Q), e.value(next.Vel), blow_up)) {
      out.diverged = true;
      break;
    }
    out.Q.push_back(next.Q);
    out.Vel.push_back(next.Vel);
    if (want_diag) out.diags.push_back(std::move(diag));
    st = next;
  }
  return out;
}

template <class E, class Force>
Rollout<E> vv_rollout(E& e, const mech::SystemSpec& s, const CdlContext<E>& ctx,
                      typename E::V Q0, typename E::V V0, int n_steps,
                      Force&& force, double blow_up = 1e6) {
  Rollout<E> out;
  out.Q.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.Vel.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.Q.push_back(Q0);
  out.Vel.push_back(V0);
  State<E> st{Q0, V0};
  typename E::V acc_cache{};
  bool acc_valid = false;
  for (int n = 0; n < n_steps; ++n) {
    State<E> next = vv_step(e, s, ctx, st, force, acc_cache, acc_valid);
    acc_valid = true;
    if (!detail::state_ok(e.value(next.Q), e.value(next.Vel), blow_up)) {
      out.diverged = true;
      break;
    }
    out.Q.push_back(next.Q);
    out.Vel.push_back(next.Vel);
    st = next;
  }
  return out;
}

}  // namespace lab::integ
