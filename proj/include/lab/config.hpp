#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lab/models.hpp"
#include "lab/scene.hpp"
#include "lab/train.hpp"

namespace lab::harness {

// One experiment: a scene, a model family, the dataset recipe, and the
// optimisation protocol.  Serialises to JSON; a config file may be partial —
// missing fields take the scene's defaults.
struct ExperimentConfig {
  std::string scene = "pendulum";  // pendulum | ball | cradle
  std::string model = "cdl";       // cdl | cdl-no-touch | resnet | resnet-contact | vin-vv

  int n_trajectories = 20;  // training windows drawn from the long rollout
  int window_len = 10;      // points per window
  double sigma = 0.2;       // observation noise scale
  std::uint64_t seed = 0;
  double elasticity = -1.0;  // < 0 keeps the scene default restitution
  bool jitter_ic = false;    // independent perturbed-IC rollouts instead of slices

  std::vector<int> hidden = {500, 500};
  train::TrainConfig training;

  int test_windows = 5;
  int test_len = 101;  // points per held-out window (100 forecast steps)

  std::string out_dir = "runs";

  // with_out=false omits the output root: two runs of the same experiment
  // into different directories are the same experiment.
  std::string to_json(bool with_out = true) const;
  static ExperimentConfig from_json(const std::string& text);

  void validate() const;  // throws ConfigError
};

// Scene-calibrated defaults: trajectory counts and epoch budgets differ per
// scene; everything else is shared.
ExperimentConfig defaults_for(const std::string& scene, const std::string& model);

// The scene spec with the config's restitution override applied.
mech::SystemSpec scene_for(const ExperimentConfig& cfg);

models::ModelKind arch_for(const std::string& model_tag);

// FNV-1a over the canonical serialisation (output root excluded), as 16 hex
// digits.  Content-addresses run directories.
std::string config_hash(const ExperimentConfig& cfg);

// <out_dir>/<scene>/<model>/<hash>
std::string run_dir(const ExperimentConfig& cfg);

}  // namespace lab::harness
