#pragma once

#include <string>
#include <vector>

#include "lab/config.hpp"

namespace lab::harness {

// The harness commands.  Each one works inside the config's content-addressed
// run directory (<out>/<scene>/<model>/<hash>) and returns that directory.
// Run directories are never overwritten: a completed run (report.json
// present) is reused as is, so sweeps can resume and results stay stable.

// Simulate the dataset and write dataset.json + dataset.csv.
std::string cmd_generate(const ExperimentConfig& cfg);

// Train the configured model on the (possibly freshly generated) dataset,
// evaluate it on held-out windows, and write checkpoint.json, report.json,
// and losses.csv.
std::string cmd_train(const ExperimentConfig& cfg);

// Re-score an existing checkpoint on the held-out windows and refresh the
// report's evaluation block.
std::string cmd_eval(const ExperimentConfig& cfg);

// Emit the figure set for a trained run: phase portrait, energy trace,
// learned-vs-true potential gradient on a probe grid, and the contact
// function.  Every chart is written as SVG plus a CSV of the same numbers.
std::string cmd_plot(const ExperimentConfig& cfg);

// Knobs for scaling a reproduction down (or relocating its output) without
// changing the protocol itself.  Negative / empty fields keep the protocol
// values.
struct ReproduceOverrides {
  int epochs = -1;
  int n_trajectories = -1;
  int seeds = -1;
  int test_windows = -1;
  int test_len = -1;
  std::vector<int> hidden;
  double elasticity = -1.0;
  std::string out_dir = "runs";
};

// Run one benchmark table end to end (training every (model, seed) cell or
// reusing completed runs), aggregate the scores, and write
// <out>/tables/<table>.md and .csv with the reference values alongside.
// Known tables: pendulum-fig3, ball-table1, cradle-table2, ball-elastic,
// cradle-no-touch.  Sub-run failures are recorded as gaps; the table is still
// emitted.  Returns the markdown text.
std::string cmd_reproduce(const std::string& table, const ReproduceOverrides& ov);

}  // namespace lab::harness
