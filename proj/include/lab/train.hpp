#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lab/dataset.hpp"
#include "lab/models.hpp"

namespace lab::train {

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 2000;
  int horizon = 10;  // points per training window
  int batch = 8;     // windows per optimizer step
  double lambda_reg = 1e-4;
  std::uint64_t seed = 0;
  bool teacher_forcing = true;  // drive contact gates from the recorded flags
  bool touch = true;            // flags observed: BCE supervision + recorded gates

  void validate() const;  // throws ConfigError
};

// One horizon-point slice of a dataset window, starting at `start`.
struct WindowRef {
  int window = 0;
  int start = 0;
};

// Non-overlapping consecutive horizon-point slices of every window, shuffled
// deterministically per (seed, epoch) and grouped into batches of `batch`
// slices; the last batch may be smaller.  Throws ConfigError when a window is
// shorter than the horizon.
std::vector<std::vector<WindowRef>> make_batches(const mech::Dataset& ds, int horizon, int batch,
                                                 std::uint64_t seed, int epoch);

struct EpochLoss {
  double t = 0.0;  // trajectory term
  double c = 0.0;  // contact cross-entropy term
  double r = 0.0;  // weight regulariser

  double total() const { return t + c + r; }
};

struct EvalReport {
  double rmse = 0.0;        // joint RMSE against the noise-free references
  double rmse_noisy = 0.0;  // same forecasts scored against re-noised references
  double contact_accuracy = 1.0;
  std::vector<double> energy;  // E(Q_n, Qdot_n) along the first window's forecast
  bool diverged = false;
};

struct RunReport {
  std::vector<EpochLoss> losses;  // one per completed epoch, averaged over batches
  EvalReport eval;                // filled by evaluate(); train() leaves defaults
  bool aborted = false;           // a non-finite loss rolled the model back
  int completed_epochs = 0;
  double wall_seconds = 0.0;
};

// Optimize the model's parameters in place with Adam on mini-batch rollouts.
// Every epoch ends with a parameter snapshot; a non-finite loss, a diverged
// rollout, or a non-finite gradient restores the last snapshot, flags the
// report as aborted, and stops.
RunReport train(models::CdlModel& m, const mech::Dataset& ds, const TrainConfig& cfg);
RunReport train(models::ResNetModel& m, const mech::Dataset& ds, const TrainConfig& cfg);
RunReport train(models::VinModel& m, const mech::Dataset& ds, const TrainConfig& cfg);

// (initial state, its contact flags, n_steps) -> forecast trajectory.
using Forecaster =
    std::function<mech::Trajectory(const mech::StaggeredState&, const mech::ContactSignal&, int)>;

// Wrap a snapshot of the model for evaluation (the model is copied).
Forecaster forecaster_for(const models::CdlModel& m);
Forecaster forecaster_for(const models::ResNetModel& m);
Forecaster forecaster_for(const models::VinModel& m);

// Forecast each window from its first sample and score the results: RMSE over
// every state scalar against the windows as given (noise-free references),
// the same forecasts against re-noised copies (sigma_noisy, seeded from
// noise_seed), and the fraction of correctly predicted contact flags over all
// forecast points.  The energy trace of the first window's forecast is kept
// for plotting.  A truncated forecast is scored on the points it produced and
// marks the report diverged.
EvalReport evaluate(const Forecaster& fc, const mech::SystemSpec& scene,
                    const std::vector<mech::Trajectory>& test_windows, double sigma_noisy,
                    std::uint64_t noise_seed);

}  // namespace lab::train
