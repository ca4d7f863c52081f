#pragma once

#include <string>
#include <vector>

#include "lab/tensor.hpp"

namespace lab::mech {

// The three reference systems.  Every coordinate is one-dimensional, so a
// scene with K bodies has generalized position Q in R^K and velocity Qdot in
// R^K.  Angle scenes (pendulum, cradle) use the arm angle as coordinate; the
// ball uses height above the origin.
enum class SceneKind { Pendulum, Ball, Cradle };

std::string scene_name(SceneKind kind);
SceneKind scene_from_name(const std::string& name);

struct SystemSpec {
  SceneKind kind = SceneKind::Pendulum;
  int K = 1;                    // number of bodies / generalized coordinates
  std::vector<double> masses;   // physical masses, one per body
  double e = 1.0;               // Newton restitution coefficient
  double g = 9.81;              // gravitational acceleration
  double length = 1.0;          // arm length for angle scenes
  double floor = 0.0;           // wall height for the ball scene
  double h = 0.02;              // integrator step size
  std::vector<double> q0;       // initial positions (synchronous)
  std::vector<double> v0;       // initial velocities (synchronous)

  // Integrator switches.  `projection` snaps penetrating bodies back to the
  // contact surface on steps where an impulse fired; `approach_guard` only
  // admits impulses when the bodies are actually closing; the position update
  // advances by a full step h unless `position_half_step` is set.
  bool projection = false;
  bool approach_guard = true;
  bool position_half_step = false;

  // Generalized inertia of coordinate k: the plain mass for the ball, m*l^2
  // for angle coordinates.
  double inertia(int k) const;
  Tensor inertia_diag() const;      // (K,K)
  Tensor inv_inertia_diag() const;  // (K,K)

  void validate() const;  // throws ConfigError on inconsistent fields

  std::string to_json() const;
  static SystemSpec from_json(const std::string& text);
};

// Scene factories with the reference defaults used throughout the experiments.
SystemSpec make_pendulum();  // q0 = 1 rad at rest, h = 0.02
SystemSpec make_ball();      // dropped from q0 = 10 above a floor at 0, e = 1
SystemSpec make_cradle();    // two arms, left one swinging in at 2 rad/s, e = 1

// --- contact geometry -------------------------------------------------------
//
// gap() returns one signed distance per body and batch column: positive when
// separated, zero at touch, negative when penetrating.  The pendulum has no
// contacts and reports +infinity.  For the cradle both rows carry the single
// pair gap q2 - q1.
Tensor gap(const SystemSpec& spec, const Tensor& Q);  // (K,B) -> (K,B)

// Exact per-body contact flags for a single state (B = 1): gap <= 0.
std::vector<int> contact_flags(const SystemSpec& spec, const Tensor& Q);

// Contact normals in the body frame, one row per body (empty for the
// pendulum).  The sign convention matches the impulse bookkeeping in
// integ::cdl_step: +1 for the ball's floor normal, (1, -1) for the cradle.
Tensor build_L(const SystemSpec& spec);

// Contact incidence for a given flag vector: diag -1 for each body in
// contact, +1 on the off-diagonal for a mutual pair.  A cradle pair with only
// one flag raised is inconsistent and throws.
Tensor build_A(const SystemSpec& spec, const std::vector<int>& flags);

// Effective-mass matrix: elementwise reciprocal of the nonzero entries of
// A * M^-1 * A^T (zero entries stay zero).
Tensor build_H(const SystemSpec& spec, const Tensor& A);

// --- true dynamics and energy -----------------------------------------------

// Generalized force -dV/dQ, batched: (K,B) -> (K,B).
Tensor true_force(const SystemSpec& spec, const Tensor& Q);

double potential(const SystemSpec& spec, const Tensor& Q);    // (K,1)
double kinetic(const SystemSpec& spec, const Tensor& Qdot);   // (K,1)
double energy(const SystemSpec& spec, const Tensor& Q, const Tensor& Qdot);

}  // namespace lab::mech
