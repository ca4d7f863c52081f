#pragma once

#include <string>
#include <vector>

#include "lab/config.hpp"
#include "lab/dataset.hpp"
#include "lab/train.hpp"

namespace lab::harness {

// Full run record: config snapshot, per-epoch losses, evaluation metrics,
// and bookkeeping.
std::string report_to_json(const ExperimentConfig& cfg, const std::string& hash,
                           const train::RunReport& rep);

// The fields the tables and plots read back.
struct ReportSummary {
  std::string scene, model, hash;
  double rmse = 0.0;
  double rmse_noisy = 0.0;
  double contact_accuracy = 0.0;
  bool aborted = false;
  bool diverged = false;
  int completed_epochs = 0;
  double wall_seconds = 0.0;
  std::vector<double> energy;
  std::vector<train::EpochLoss> losses;
};

ReportSummary report_from_json(const std::string& text);

// epoch,L_T,L_C,L_R,total — one row per epoch.
std::string losses_to_csv(const std::vector<train::EpochLoss>& losses);

// window,point,t,q_1..q_K,v_1..v_K,c_1..c_K over every window.
std::string dataset_to_csv(const mech::Dataset& ds);

void ensure_dir(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace lab::harness
