#include "lab/dataset.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "lab/errors.hpp"
#include "lab/ground_truth.hpp"
#include "lab/rng.hpp"

namespace lab::mech {

namespace {

std::vector<Trajectory> slice_windows(const Trajectory& long_traj, int first_point,
                                      int n_windows, int window_len) {
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n_windows));
  for (int w = 0; w < n_windows; ++w) {
    Trajectory win;
    win.h = long_traj.h;
    win.sigma = 0.0;
    win.seed = 0;
    const int base = first_point + w * window_len;
    for (int i = 0; i < window_len; ++i) {
      win.states.push_back(long_traj.states[static_cast<std::size_t>(base + i)]);
      win.contacts.push_back(long_traj.contacts[static_cast<std::size_t>(base + i)]);
    }
    out.push_back(std::move(win));
  }
  return out;
}

void add_observation_noise(std::vector<Trajectory>& windows, double sigma,
                           std::uint64_t seed) {
  if (sigma == 0.0) return;
  std::mt19937_64 rng(mix_seed(seed, 0xDA7A5E7ull));
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& win : windows) {
    win.sigma = sigma;
    for (auto& st : win.states) {
      for (double& x : st.Q.data) x += n(rng);
      for (double& x : st.Qdot.data) x += n(rng);
    }
  }
}

}  // namespace

Dataset make_dataset(const SystemSpec& spec, int n_windows, int window_len,
                     double sigma, std::uint64_t seed, bool jitter_ic) {
  if (n_windows < 1 || window_len < 2)
    throw ConfigError("dataset: need n_windows >= 1 and window_len >= 2");
  if (sigma < 0.0) throw ConfigError("dataset: sigma must be >= 0");

  Dataset ds;
  ds.spec = spec;
  ds.sigma = sigma;
  ds.seed = seed;

  if (!jitter_ic) {
    const int total = n_windows * window_len;
    const GroundTruth gt = generate_ground_truth(spec, total - 1);
    ds.windows = slice_windows(gt.traj, 0, n_windows, window_len);
  } else {
    std::mt19937_64 rng(mix_seed(seed, 0x1C5EEDull));
    std::normal_distribution<double> n(0.0, sigma);
    for (int w = 0; w < n_windows; ++w) {
      SystemSpec jittered = spec;
      for (double& q : jittered.q0) q += n(rng);
      for (double& v : jittered.v0) v += n(rng);
      const GroundTruth gt = generate_ground_truth(jittered, window_len - 1);
      ds.windows.push_back(gt.traj);
    }
  }

  add_observation_noise(ds.windows, sigma, seed);
  for (std::size_t w = 0; w < ds.windows.size(); ++w)
    ds.windows[w].seed = mix_seed(seed, w);
  return ds;
}

std::vector<Trajectory> make_test_windows(const SystemSpec& spec, int skip_points,
                                          int n_windows, int window_len) {
  if (n_windows < 1 || window_len < 2 || skip_points < 0)
    throw ConfigError("dataset: bad test window request");
  const int total = skip_points + n_windows * window_len;
  const GroundTruth gt = generate_ground_truth(spec, total - 1);
  return slice_windows(gt.traj, skip_points, n_windows, window_len);
}

std::string Dataset::to_json() const {
  nlohmann::ordered_json j;
  j["spec"] = nlohmann::ordered_json::parse(spec.to_json());
  j["sigma"] = sigma;
  j["seed"] = seed;
  auto ws = nlohmann::json::array();
  for (const auto& w : windows) ws.push_back(nlohmann::json::parse(trajectory_to_json(w)));
  j["windows"] = std::move(ws);
  return j.dump();
}

Dataset Dataset::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(std::string("dataset: bad JSON: ") + ex.what());
  }
  Dataset ds;
  try {
    ds.spec = SystemSpec::from_json(j.at("spec").dump());
    ds.sigma = j.at("sigma").get<double>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& w : j.at("windows"))
      ds.windows.push_back(trajectory_from_json(w.dump()));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("dataset: missing or mistyped field: ") + ex.what());
  }
  return ds;
}

}  // namespace lab::mech
