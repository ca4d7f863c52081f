#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lab/scene.hpp"
#include "lab/trajectory.hpp"

namespace lab::mech {

// A training set: windows of noisy observations of one system.  The default
// construction integrates a single long ground-truth rollout of
// n_windows * window_len points and slices it into consecutive windows;
// Gaussian noise of scale sigma is then added to every position and velocity
// sample.  Contact flags are kept clean (they come from the recording
// apparatus, not the noisy state estimate).
struct Dataset {
  SystemSpec spec;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Trajectory> windows;

  std::string to_json() const;
  static Dataset from_json(const std::string& text);
};

// jitter_ic = true switches to the alternative sampling: each window is an
// independent rollout whose initial position/velocity are perturbed by the
// same noise scale, with observation noise applied on top.
Dataset make_dataset(const SystemSpec& spec, int n_windows, int window_len,
                     double sigma, std::uint64_t seed, bool jitter_ic = false);

// Noise-free evaluation windows that continue the training rollout: the long
// trajectory is extended past the skip_points training samples and the tail
// is sliced into n_windows windows of window_len points.
std::vector<Trajectory> make_test_windows(const SystemSpec& spec, int skip_points,
                                          int n_windows, int window_len);

}  // namespace lab::mech
