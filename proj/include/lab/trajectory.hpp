#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lab/tensor.hpp"

namespace lab::mech {

// One staggered sample: position Q_n lives on the integer grid t = n*h while
// the velocity stored next to it is the half-step value Qdot_{n+1/2}.  The
// contact flags c_n are evaluated at Q_n.
struct StaggeredState {
  Tensor Q;     // (K,1)
  Tensor Qdot;  // (K,1)
};

using ContactSignal = std::vector<int>;  // one 0/1 flag per body

struct Trajectory {
  std::vector<StaggeredState> states;
  std::vector<ContactSignal> contacts;  // same length as states
  double h = 0.0;
  double sigma = 0.0;    // observation-noise level the samples were drawn with
  std::uint64_t seed = 0;

  int n_points() const { return static_cast<int>(states.size()); }
};

// Columns of a trajectory packed as matrices: positions (K,N), velocities
// (K,N), flags (K,N).  Useful for batching and plotting.
Tensor pack_positions(const Trajectory& t);
Tensor pack_velocities(const Trajectory& t);
Tensor pack_contacts(const Trajectory& t);

std::string trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const std::string& text);

// CSV with one row per sample: t, q_1..q_K, v_1..v_K, c_1..c_K.  The time
// column is the position timestamp n*h; velocities are the staggered
// half-step values.
std::string trajectory_to_csv(const Trajectory& t);

}  // namespace lab::mech
