#pragma once

#include <vector>

#include "lab/mlp.hpp"
#include "lab/tape.hpp"
#include "lab/tensor.hpp"
#include "lab/trajectory.hpp"

namespace lab::train {

// Mean squared error per state scalar: the sum of squared differences over
// every aligned sample, divided by N * D (points times state dimension).
// Each entry holds one (D,B) point; B columns count toward the mean.
double loss_trajectory(const std::vector<Tensor>& pred, const std::vector<Tensor>& observed);

// Same loss between two equally long trajectories, with the state read as
// the stacked positions and velocities (D = 2K).
double loss_trajectory(const mech::Trajectory& pred, const mech::Trajectory& observed);

// Binary cross-entropy between predicted contact probabilities and recorded
// 0/1 flags, averaged over every entry.  Probabilities are clamped to
// [1e-7, 1 - 1e-7] before the logs.
double loss_contact(const Tensor& probs, const Tensor& flags);

// --- tape-graph forms used during training ----------------------------------

// Rollout loss on staggered points.  pred_q/pred_v hold N points of shape
// (K,B); obs_q/obs_v are the matching observations.  Point 0 is the shared
// initial condition (its error is identically zero), so it is skipped in the
// sum but still counted in the N*D*B normalisation, which keeps the value
// equal to a plain mean over all points.
ad::DiffValue loss_trajectory_tape(ad::Tape& t, const std::vector<ad::DiffValue>& pred_q,
                                   const std::vector<ad::DiffValue>& pred_v,
                                   const std::vector<Tensor>& obs_q,
                                   const std::vector<Tensor>& obs_v);

// Same loss for a residual chain on stacked states s = [Q; Qdot] of shape
// (2K,B).
ad::DiffValue loss_trajectory_tape(ad::Tape& t, const std::vector<ad::DiffValue>& pred_s,
                                   const std::vector<Tensor>& obs_s);

// Clamped binary cross-entropy on the tape; probs is (K,M), flags its 0/1
// targets.
ad::DiffValue loss_contact_tape(ad::Tape& t, ad::DiffValue probs, const Tensor& flags);

// lambda * sum of squared weight-matrix entries of one network.  Biases are
// excluded.  theta must be a lease of the network's parameters in store
// order; returns a constant zero when lambda == 0 so the graph carries no
// dead regulariser ops.
ad::DiffValue loss_reg_tape(ad::Tape& t, const std::vector<ad::DiffValue>& theta,
                            const ad::MlpSpec& spec, double lambda);

}  // namespace lab::train
