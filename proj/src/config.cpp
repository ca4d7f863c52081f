#include "lab/config.hpp"

#include <json.hpp>

#include "lab/errors.hpp"

namespace lab::harness {

using nlohmann::ordered_json;

namespace {

bool known_scene(const std::string& s) { return s == "pendulum" || s == "ball" || s == "cradle"; }

bool known_model(const std::string& m) {
  return m == "cdl" || m == "cdl-no-touch" || m == "resnet" || m == "resnet-contact" ||
         m == "vin-vv";
}

}  // namespace

std::string ExperimentConfig::to_json(bool with_out) const {
  ordered_json j;
  j["scene"] = scene;
  j["model"] = model;
  j["dataset"] = {{"n_trajectories", n_trajectories}, {"window_len", window_len},
                  {"sigma", sigma},                   {"seed", seed},
                  {"elasticity", elasticity},         {"jitter_ic", jitter_ic}};
  j["model_arch"] = {{"hidden", hidden}};
  j["training"] = {{"lr", training.lr},
                   {"epochs", training.epochs},
                   {"horizon", training.horizon},
                   {"batch", training.batch},
                   {"lambda_reg", training.lambda_reg},
                   {"teacher_forcing", training.teacher_forcing},
                   {"touch", training.touch}};
  j["eval"] = {{"test_windows", test_windows}, {"test_len", test_len}};
  if (with_out) j["out_dir"] = out_dir;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  const std::string scene = j.value("scene", std::string("pendulum"));
  const std::string model = j.value("model", std::string("cdl"));
  ExperimentConfig cfg = defaults_for(scene, model);

  const ordered_json d = j.value("dataset", ordered_json::object());
  cfg.n_trajectories = d.value("n_trajectories", cfg.n_trajectories);
  cfg.window_len = d.value("window_len", cfg.window_len);
  cfg.sigma = d.value("sigma", cfg.sigma);
  cfg.seed = d.value("seed", cfg.seed);
  cfg.elasticity = d.value("elasticity", cfg.elasticity);
  cfg.jitter_ic = d.value("jitter_ic", cfg.jitter_ic);

  const ordered_json a = j.value("model_arch", ordered_json::object());
  cfg.hidden = a.value("hidden", cfg.hidden);

  const ordered_json t = j.value("training", ordered_json::object());
  cfg.training.lr = t.value("lr", cfg.training.lr);
  cfg.training.epochs = t.value("epochs", cfg.training.epochs);
  cfg.training.horizon = t.value("horizon", cfg.training.horizon);
  cfg.training.batch = t.value("batch", cfg.training.batch);
  cfg.training.lambda_reg = t.value("lambda_reg", cfg.training.lambda_reg);
  cfg.training.teacher_forcing = t.value("teacher_forcing", cfg.training.teacher_forcing);
  cfg.training.touch = t.value("touch", cfg.training.touch);

  const ordered_json e = j.value("eval", ordered_json::object());
  cfg.test_windows = e.value("test_windows", cfg.test_windows);
  cfg.test_len = e.value("test_len", cfg.test_len);

  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.training.seed = cfg.seed;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (!known_scene(scene)) throw ConfigError("config: unknown scene '" + scene + "'");
  if (!known_model(model)) throw ConfigError("config: unknown model '" + model + "'");
  if (model == "vin-vv" && scene != "pendulum") {
    throw ConfigError("config: vin-vv integrates smooth dynamics only; scene '" + scene +
                      "' has contacts");
  }
  if (model == "cdl-no-touch" && training.touch) {
    throw ConfigError("config: cdl-no-touch requires training.touch = false");
  }
  if (n_trajectories < 1) throw ConfigError("config: n_trajectories must be >= 1");
  if (window_len < 2) throw ConfigError("config: window_len must be >= 2");
  if (sigma < 0.0) throw ConfigError("config: sigma must be >= 0");
  if (elasticity >= 0.0 && elasticity > 1.0) {
    throw ConfigError("config: elasticity must lie in [0, 1]");
  }
  if (hidden.empty()) throw ConfigError("config: at least one hidden layer");
  for (const int w : hidden) {
    if (w < 1) throw ConfigError("config: hidden widths must be positive");
  }
  if (test_windows < 1) throw ConfigError("config: test_windows must be >= 1");
  if (test_len < 2) throw ConfigError("config: test_len must be >= 2");
  if (training.horizon > window_len) {
    throw ConfigError("config: training horizon exceeds the window length");
  }
  training.validate();
}

ExperimentConfig defaults_for(const std::string& scene, const std::string& model) {
  if (!known_scene(scene)) throw ConfigError("config: unknown scene '" + scene + "'");
  if (!known_model(model)) throw ConfigError("config: unknown model '" + model + "'");
  ExperimentConfig cfg;
  cfg.scene = scene;
  cfg.model = model;
  if (scene == "pendulum") {
    cfg.n_trajectories = 20;
    cfg.training.epochs = 3000;
  } else if (scene == "ball") {
    cfg.n_trajectories = 52;
    cfg.training.epochs = 2000;
  } else {
    cfg.n_trajectories = 54;
    cfg.training.epochs = 2000;
  }
  cfg.training.touch = model != "cdl-no-touch";
  cfg.training.seed = cfg.seed;
  return cfg;
}

mech::SystemSpec scene_for(const ExperimentConfig& cfg) {
  mech::SystemSpec spec;
  if (cfg.scene == "pendulum") {
    spec = mech::make_pendulum();
  } else if (cfg.scene == "ball") {
    spec = mech::make_ball();
  } else if (cfg.scene == "cradle") {
    spec = mech::make_cradle();
  } else {
    throw ConfigError("config: unknown scene '" + cfg.scene + "'");
  }
  if (cfg.elasticity >= 0.0) spec.e = cfg.elasticity;
  spec.validate();
  return spec;
}

models::ModelKind arch_for(const std::string& model_tag) {
  if (model_tag == "cdl" || model_tag == "cdl-no-touch") return models::ModelKind::Cdl;
  if (model_tag == "resnet") return models::ModelKind::ResNet;
  if (model_tag == "resnet-contact") return models::ModelKind::ResNetContact;
  if (model_tag == "vin-vv") return models::ModelKind::Vin;
  throw ConfigError("config: unknown model '" + model_tag + "'");
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canon = cfg.to_json(/*with_out=*/false);
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string run_dir(const ExperimentConfig& cfg) {
  return cfg.out_dir + "/" + cfg.scene + "/" + cfg.model + "/" + config_hash(cfg);
}

}  // namespace lab::harness
