#include "lab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "lab/errors.hpp"

namespace lab::harness {

using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const ExperimentConfig& cfg, const std::string& hash,
                           const train::RunReport& rep) {
  ordered_json j;
  j["config"] = ordered_json::parse(cfg.to_json());
  j["config_hash"] = hash;
  j["aborted"] = rep.aborted;
  j["completed_epochs"] = rep.completed_epochs;
  j["wall_seconds"] = rep.wall_seconds;
  ordered_json losses;
  losses["t"] = ordered_json::array();
  losses["c"] = ordered_json::array();
  losses["r"] = ordered_json::array();
  for (const auto& l : rep.losses) {
    losses["t"].push_back(l.t);
    losses["c"].push_back(l.c);
    losses["r"].push_back(l.r);
  }
  j["losses"] = losses;
  j["eval"] = {{"rmse", rep.eval.rmse},
               {"rmse_noisy", rep.eval.rmse_noisy},
               {"contact_accuracy", rep.eval.contact_accuracy},
               {"diverged", rep.eval.diverged},
               {"energy", rep.eval.energy}};
  return j.dump(2);
}

ReportSummary report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("report JSON: ") + e.what());
  }
  ReportSummary s;
  const ordered_json cfg = j.value("config", ordered_json::object());
  s.scene = cfg.value("scene", std::string());
  s.model = cfg.value("model", std::string());
  s.hash = j.value("config_hash", std::string());
  s.aborted = j.value("aborted", false);
  s.completed_epochs = j.value("completed_epochs", 0);
  s.wall_seconds = j.value("wall_seconds", 0.0);
  const ordered_json ev = j.value("eval", ordered_json::object());
  s.rmse = ev.value("rmse", 0.0);
  s.rmse_noisy = ev.value("rmse_noisy", 0.0);
  s.contact_accuracy = ev.value("contact_accuracy", 0.0);
  s.diverged = ev.value("diverged", false);
  s.energy = ev.value("energy", std::vector<double>{});
  const ordered_json lo = j.value("losses", ordered_json::object());
  const auto lt = lo.value("t", std::vector<double>{});
  const auto lc = lo.value("c", std::vector<double>{});
  const auto lr = lo.value("r", std::vector<double>{});
  if (lt.size() != lc.size() || lt.size() != lr.size()) {
    throw ConfigError("report JSON: ragged loss arrays");
  }
  for (std::size_t i = 0; i < lt.size(); ++i) s.losses.push_back({lt[i], lc[i], lr[i]});
  return s;
}

std::string losses_to_csv(const std::vector<train::EpochLoss>& losses) {
  std::string out = "epoch,L_T,L_C,L_R,total\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out += std::to_string(i) + "," + fmt(losses[i].t) + "," + fmt(losses[i].c) + "," +
           fmt(losses[i].r) + "," + fmt(losses[i].total()) + "\n";
  }
  return out;
}

std::string dataset_to_csv(const mech::Dataset& ds) {
  const int K = ds.spec.K;
  std::string out = "window,point,t";
  for (int k = 1; k <= K; ++k) out += ",q_" + std::to_string(k);
  for (int k = 1; k <= K; ++k) out += ",v_" + std::to_string(k);
  for (int k = 1; k <= K; ++k) out += ",c_" + std::to_string(k);
  out += "\n";
  for (std::size_t w = 0; w < ds.windows.size(); ++w) {
    const mech::Trajectory& tr = ds.windows[w];
    for (int i = 0; i < tr.n_points(); ++i) {
      out += std::to_string(w) + "," + std::to_string(i) + "," + fmt(tr.h * i);
      for (int k = 0; k < K; ++k) out += "," + fmt(tr.states[i].Q(k, 0));
      for (int k = 0; k < K; ++k) out += "," + fmt(tr.states[i].Qdot(k, 0));
      for (int k = 0; k < K; ++k) out += "," + std::to_string(tr.contacts[i][k]);
      out += "\n";
    }
  }
  return out;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create directory '" + path + "': " + ec.message());
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

}  // namespace lab::harness
