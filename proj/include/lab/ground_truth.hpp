#pragma once

#include <vector>

#include "lab/scene.hpp"
#include "lab/trajectory.hpp"

namespace lab::mech {

// One recorded impulse application during a ground-truth rollout.
struct ImpulseEvent {
  int step = 0;  // transition index: applied between points `step` and `step+1`
  std::vector<int> flags;        // contact flags at the post-step positions
  std::vector<double> impulse;   // generalized impulse per body
  std::vector<double> lambda;    // impulse along the repulsive normal
  std::vector<double> v_pre;     // velocity entering the step
  std::vector<double> v_smooth;  // after the force update, before the impulse
  std::vector<double> v_post;    // leaving the step
};

struct GroundTruth {
  Trajectory traj;
  std::vector<ImpulseEvent> impulses;
};

// Integrate the true dynamics for n_steps from the scene's initial
// conditions.  The staggered start applies a half-step kick to the initial
// velocity: Qdot_{1/2} = v0 + (h/2) M^-1 F(q0).  Contact flags are recorded
// per point from the stored positions.  Throws NumericalError (with the step
// index) if the state turns non-finite or blows past 1e6.
GroundTruth generate_ground_truth(const SystemSpec& spec, int n_steps);

// Report-only complementarity diagnostics over a ground-truth rollout:
// deepest penetration of the stored positions, any negative compressive
// impulse, and impulses fired without contact flags.
struct KktReport {
  int n_events = 0;
  double max_penetration = 0.0;  // max over points of max(0, -gap)
  double min_lambda = 0.0;       // most negative multiplier seen (0 if none)
  std::vector<std::string> violations;

  bool clean() const { return violations.empty(); }
};

KktReport check_kkt(const SystemSpec& spec, const GroundTruth& gt);

}  // namespace lab::mech
