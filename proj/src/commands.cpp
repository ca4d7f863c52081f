#include "lab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lab/dataset.hpp"
#include "lab/errors.hpp"
#include "lab/mlp.hpp"
#include "lab/models.hpp"
#include "lab/params.hpp"
#include "lab/report.hpp"
#include "lab/rng.hpp"
#include "lab/svgplot.hpp"
#include "lab/tape.hpp"
#include "lab/train.hpp"

namespace lab::harness {

namespace {

// Sub-seed salts: the dataset, the parameter init, and the evaluation noise
// each get an independent stream derived from the one user-facing seed.
constexpr std::uint64_t kDataSalt = 0xDA7A5E7ull;
constexpr std::uint64_t kInitSalt = 0x1217D0DEull;
constexpr std::uint64_t kEvalNoiseSalt = 0xE7A1ull;

std::string path_join(const std::string& dir, const std::string& name) { return dir + "/" + name; }

std::string fmt(double v, const char* f = "%.3f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Impact events in the clean flags: rising edges of any body's flag, summed
// over windows.
int count_contact_events(const mech::Dataset& ds) {
  int events = 0;
  for (const auto& w : ds.windows) {
    for (std::size_t i = 1; i < w.contacts.size(); ++i) {
      bool was = false, is = false;
      for (std::size_t k = 0; k < w.contacts[i].size(); ++k) {
        was = was || w.contacts[i - 1][k] != 0;
        is = is || w.contacts[i][k] != 0;
      }
      if (is && !was) ++events;
    }
  }
  return events;
}

// Load the run's dataset if it was generated before; otherwise simulate it
// and write dataset.json + dataset.csv.
mech::Dataset load_or_make_dataset(const ExperimentConfig& cfg, const std::string& dir) {
  const std::string json_path = path_join(dir, "dataset.json");
  if (file_exists(json_path)) {
    return mech::Dataset::from_json(ad::read_text_file(json_path));
  }
  const mech::SystemSpec spec = scene_for(cfg);
  const mech::Dataset ds = mech::make_dataset(spec, cfg.n_trajectories, cfg.window_len, cfg.sigma,
                                              mix_seed(cfg.seed, kDataSalt), cfg.jitter_ic);
  ad::write_text_file(json_path, ds.to_json());
  ad::write_text_file(path_join(dir, "dataset.csv"), dataset_to_csv(ds));
  return ds;
}

std::vector<mech::Trajectory> test_windows_for(const ExperimentConfig& cfg) {
  const mech::SystemSpec spec = scene_for(cfg);
  return mech::make_test_windows(spec, cfg.n_trajectories * cfg.window_len, cfg.test_windows,
                                 cfg.test_len);
}

// Everything cmd_train needs back from the model-specific branch.
struct TrainedArtifacts {
  train::RunReport rep;
  std::string checkpoint;
  train::Forecaster forecast;
};

TrainedArtifacts train_dispatch(const ExperimentConfig& cfg, const mech::Dataset& ds,
                                const std::string& hash) {
  train::TrainConfig tcfg = cfg.training;
  tcfg.seed = cfg.seed;
  const std::uint64_t init_seed = mix_seed(cfg.seed, kInitSalt);
  const mech::SystemSpec spec = scene_for(cfg);

  TrainedArtifacts out;
  switch (arch_for(cfg.model)) {
    case models::ModelKind::Cdl: {
      models::CdlModel m = models::make_cdl_model(spec, cfg.hidden, init_seed);
      out.rep = train::train(m, ds, tcfg);
      out.checkpoint = models::cdl_to_json(m, hash);
      out.forecast = train::forecaster_for(m);
      break;
    }
    case models::ModelKind::ResNet:
    case models::ModelKind::ResNetContact: {
      const bool aware = arch_for(cfg.model) == models::ModelKind::ResNetContact;
      models::ResNetModel m = models::make_resnet_model(spec, aware, cfg.hidden, init_seed);
      out.rep = train::train(m, ds, tcfg);
      out.checkpoint = models::resnet_to_json(m, hash);
      out.forecast = train::forecaster_for(m);
      break;
    }
    case models::ModelKind::Vin: {
      models::VinModel m = models::make_vin_model(spec, cfg.hidden, init_seed);
      out.rep = train::train(m, ds, tcfg);
      out.checkpoint = models::vin_to_json(m, hash);
      out.forecast = train::forecaster_for(m);
      break;
    }
  }
  return out;
}

// Load the checkpointed model and wrap it for forecasting.
train::Forecaster forecaster_from_checkpoint(const ExperimentConfig& cfg,
                                             const std::string& dir) {
  const std::string path = path_join(dir, "checkpoint.json");
  if (!file_exists(path)) {
    throw ConfigError("no checkpoint at " + path + "; run `lab train` first");
  }
  const std::string text = ad::read_text_file(path);
  switch (arch_for(cfg.model)) {
    case models::ModelKind::Cdl:
      return train::forecaster_for(models::cdl_from_json(text));
    case models::ModelKind::ResNet:
    case models::ModelKind::ResNetContact:
      return train::forecaster_for(models::resnet_from_json(text));
    case models::ModelKind::Vin:
      return train::forecaster_for(models::vin_from_json(text));
  }
  throw ConfigError("unknown model kind");  // unreachable
}

void write_chart(const std::string& dir, const std::string& name, const std::string& title,
                 const std::string& x_label, const std::string& y_label,
                 const std::vector<Series>& series) {
  ad::write_text_file(path_join(dir, name + ".svg"),
                      line_chart_svg(title, x_label, y_label, series));
  ad::write_text_file(path_join(dir, name + ".csv"), series_to_csv(series));
}

// Probe positions for the potential-gradient panel: a line through state
// space that covers the region the training data visits.
std::vector<double> potential_grid(const mech::SystemSpec& spec) {
  double lo = -2.5, hi = 2.5;
  if (spec.kind == mech::SceneKind::Ball) {
    lo = 0.0;
    hi = 10.0;
  } else if (spec.kind == mech::SceneKind::Cradle) {
    lo = -1.0;
    hi = 1.0;
  }
  std::vector<double> g(61);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g.size() - 1);
  }
  return g;
}

// Probe positions for the contact panel, spanning both sides of the surface.
std::vector<double> contact_grid(const mech::SystemSpec& spec) {
  double lo = -2.5, hi = 2.5;
  if (spec.kind == mech::SceneKind::Ball) {
    lo = -1.0;
    hi = 3.0;
  } else if (spec.kind == mech::SceneKind::Cradle) {
    lo = -1.0;
    hi = 1.0;
  }
  std::vector<double> g(81);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g.size() - 1);
  }
  return g;
}

// Batched probe states: body 0 sweeps the grid, other bodies sit at zero.
Tensor grid_to_batch(int K, const std::vector<double>& grid, double fill = 0.0) {
  Tensor Q = Tensor::full(K, static_cast<int>(grid.size()), fill);
  for (std::size_t i = 0; i < grid.size(); ++i) Q(0, static_cast<int>(i)) = grid[i];
  return Q;
}

// -dV_theta/dq for body 0 along the probe grid.
std::vector<double> learned_force_row0(const ad::MlpSpec& spec, const ad::ParamStore& pot,
                                       const Tensor& Q) {
  ad::Tape t;
  const auto theta = ad::lease(t, pot, false);
  const ad::DiffValue F = models::learned_force(t, spec, theta, t.constant(Q));
  const Tensor& val = t.val(F);
  std::vector<double> row(val.cols);
  for (int i = 0; i < val.cols; ++i) row[i] = val(0, i);
  return row;
}

void plot_potential_panel(const ExperimentConfig& cfg, const std::string& dir,
                          const ad::MlpSpec& pot_spec, const ad::ParamStore& pot) {
  const mech::SystemSpec spec = scene_for(cfg);
  const std::vector<double> grid = potential_grid(spec);
  const Tensor Q = grid_to_batch(spec.K, grid);

  const Tensor Ftrue = mech::true_force(spec, Q);
  Series true_s{"true dV/dq", grid, {}};
  for (int i = 0; i < Ftrue.cols; ++i) true_s.y.push_back(-Ftrue(0, i));

  const std::vector<double> Flearn = learned_force_row0(pot_spec, pot, Q);
  Series learn_s{"learned dV/dq", grid, {}};
  for (const double f : Flearn) learn_s.y.push_back(-f);

  write_chart(dir, "potential", "Potential gradient (body 1)", "q", "dV/dq", {true_s, learn_s});
}

void plot_contact_panel(const ExperimentConfig& cfg, const std::string& dir,
                        const std::vector<Series>& series) {
  write_chart(dir, "contact", "Contact function (body 1)", "q", "contact probability", series);
}

std::vector<Series> cdl_contact_series(const models::CdlModel& m, const mech::SystemSpec& spec) {
  const std::vector<double> grid = contact_grid(spec);
  const Tensor Q = grid_to_batch(spec.K, grid);
  std::vector<Series> out;
  for (const double v : {-1.0, 0.0, 1.0}) {
    const Tensor V = Tensor::full(spec.K, Q.cols, v);
    const models::ContactPrediction pred = models::contact_predict(m, Q, V);
    Series s{"v = " + fmt(v, "%g"), grid, {}};
    for (int i = 0; i < pred.probs.cols; ++i) s.y.push_back(pred.probs(0, i));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Series> resnet_contact_series(const models::ResNetModel& m,
                                          const mech::SystemSpec& spec) {
  const std::vector<double> grid = contact_grid(spec);
  const Tensor Q = grid_to_batch(spec.K, grid);
  std::vector<Series> out;
  for (const double v : {-1.0, 0.0, 1.0}) {
    Tensor x = Tensor::zeros(2 * spec.K, Q.cols);
    for (int k = 0; k < spec.K; ++k) {
      for (int i = 0; i < Q.cols; ++i) {
        x(k, i) = Q(k, i);
        x(spec.K + k, i) = v;
      }
    }
    ad::Tape t;
    const auto theta = ad::lease(t, m.head, false);
    const ad::MlpTrace trace = ad::mlp_forward(t, m.head_spec, theta, t.constant(x));
    const Tensor& probs = t.val(trace.y);
    Series s{"v = " + fmt(v, "%g"), grid, {}};
    for (int i = 0; i < probs.cols; ++i) s.y.push_back(probs(0, i));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::string cmd_generate(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string dir = run_dir(cfg);
  ensure_dir(dir);
  const mech::Dataset ds = load_or_make_dataset(cfg, dir);
  std::printf("[generate] scene=%s J=%d N=%d sigma=%g contact-events=%d -> %s\n",
              cfg.scene.c_str(), cfg.n_trajectories, cfg.window_len, cfg.sigma,
              count_contact_events(ds), dir.c_str());
  return dir;
}

std::string cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string dir = run_dir(cfg);
  const std::string report_path = path_join(dir, "report.json");
  if (file_exists(report_path)) {
    const ReportSummary prev = report_from_json(ad::read_text_file(report_path));
    std::printf("[train] reusing %s (rmse=%s)\n", dir.c_str(), fmt(prev.rmse).c_str());
    return dir;
  }
  ensure_dir(dir);

  const std::string hash = config_hash(cfg);
  const mech::Dataset ds = load_or_make_dataset(cfg, dir);

  TrainedArtifacts art = train_dispatch(cfg, ds, hash);
  art.rep.eval = train::evaluate(art.forecast, scene_for(cfg), test_windows_for(cfg), cfg.sigma,
                                 mix_seed(cfg.seed, kEvalNoiseSalt));

  ad::write_text_file(path_join(dir, "checkpoint.json"), art.checkpoint);
  ad::write_text_file(report_path, report_to_json(cfg, hash, art.rep));
  ad::write_text_file(path_join(dir, "losses.csv"), losses_to_csv(art.rep.losses));

  std::printf("[train] scene=%s model=%s seed=%llu epochs=%d%s rmse=%s (%.1fs) -> %s\n",
              cfg.scene.c_str(), cfg.model.c_str(),
              static_cast<unsigned long long>(cfg.seed), art.rep.completed_epochs,
              art.rep.aborted ? " ABORTED" : "", fmt(art.rep.eval.rmse).c_str(),
              art.rep.wall_seconds, dir.c_str());
  return dir;
}

std::string cmd_eval(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string dir = run_dir(cfg);
  const train::Forecaster fc = forecaster_from_checkpoint(cfg, dir);
  const train::EvalReport eval = train::evaluate(fc, scene_for(cfg), test_windows_for(cfg),
                                                 cfg.sigma, mix_seed(cfg.seed, kEvalNoiseSalt));

  // Refresh the report's evaluation block, keeping the training history.
  train::RunReport rep;
  const std::string report_path = path_join(dir, "report.json");
  if (file_exists(report_path)) {
    const ReportSummary prev = report_from_json(ad::read_text_file(report_path));
    rep.losses = prev.losses;
    rep.aborted = prev.aborted;
    rep.completed_epochs = prev.completed_epochs;
    rep.wall_seconds = prev.wall_seconds;
  }
  rep.eval = eval;
  ad::write_text_file(report_path, report_to_json(cfg, config_hash(cfg), rep));

  std::printf("[eval] scene=%s model=%s rmse=%s rmse-noisy=%s contact-acc=%s%s\n",
              cfg.scene.c_str(), cfg.model.c_str(), fmt(eval.rmse).c_str(),
              fmt(eval.rmse_noisy).c_str(), fmt(eval.contact_accuracy).c_str(),
              eval.diverged ? " DIVERGED" : "");
  return dir;
}

std::string cmd_plot(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string dir = run_dir(cfg);
  const std::string ckpt_path = path_join(dir, "checkpoint.json");
  if (!file_exists(ckpt_path)) {
    throw ConfigError("no checkpoint at " + ckpt_path + "; run `lab train` first");
  }
  const std::string text = ad::read_text_file(ckpt_path);
  const mech::SystemSpec spec = scene_for(cfg);

  // Forecast the first held-out window for the phase and energy panels.
  const std::vector<mech::Trajectory> windows = test_windows_for(cfg);
  const mech::Trajectory& ref = windows.front();
  const train::Forecaster fc = forecaster_from_checkpoint(cfg, dir);
  const mech::Trajectory fore =
      fc(ref.states[0], ref.contacts[0], static_cast<int>(ref.states.size()) - 1);

  std::vector<Series> phase;
  std::vector<Series> energy;
  Series e_true{"true", {}, {}}, e_model{"model", {}, {}};
  for (int k = 0; k < spec.K; ++k) {
    Series pt{"true body " + std::to_string(k + 1), {}, {}};
    Series pm{"model body " + std::to_string(k + 1), {}, {}};
    for (const auto& st : ref.states) {
      pt.x.push_back(st.Q(k, 0));
      pt.y.push_back(st.Qdot(k, 0));
    }
    for (const auto& st : fore.states) {
      pm.x.push_back(st.Q(k, 0));
      pm.y.push_back(st.Qdot(k, 0));
    }
    phase.push_back(std::move(pt));
    phase.push_back(std::move(pm));
  }
  for (std::size_t i = 0; i < ref.states.size(); ++i) {
    e_true.x.push_back(static_cast<double>(i));
    e_true.y.push_back(mech::energy(spec, ref.states[i].Q, ref.states[i].Qdot));
  }
  for (std::size_t i = 0; i < fore.states.size(); ++i) {
    e_model.x.push_back(static_cast<double>(i));
    e_model.y.push_back(mech::energy(spec, fore.states[i].Q, fore.states[i].Qdot));
  }
  energy.push_back(std::move(e_true));
  energy.push_back(std::move(e_model));

  write_chart(dir, "phase", "Phase portrait (held-out window)", "q", "dq/dt", phase);
  write_chart(dir, "energy", "Energy along the forecast", "step", "E", energy);

  // Model-structure panels: only models that own the relevant nets get them.
  switch (arch_for(cfg.model)) {
    case models::ModelKind::Cdl: {
      const models::CdlModel m = models::cdl_from_json(text);
      plot_potential_panel(cfg, dir, m.pot_spec, m.pot);
      plot_contact_panel(cfg, dir, cdl_contact_series(m, spec));
      break;
    }
    case models::ModelKind::Vin: {
      const models::VinModel m = models::vin_from_json(text);
      plot_potential_panel(cfg, dir, m.pot_spec, m.pot);
      break;
    }
    case models::ModelKind::ResNetContact: {
      const models::ResNetModel m = models::resnet_from_json(text);
      plot_contact_panel(cfg, dir, resnet_contact_series(m, spec));
      break;
    }
    case models::ModelKind::ResNet:
      break;  // no potential, no contact head
  }

  std::printf("[plot] wrote charts to %s\n", dir.c_str());
  return dir;
}

// --- reproduce -------------------------------------------------------------

namespace {

struct Protocol {
  std::string scene;
  std::vector<std::string> models;
  std::vector<std::string> refs;  // published values, same order as models
  int n_trajectories = -1;        // -1 keeps the scene default
  double sigma = -1.0;
  double elasticity = -1.0;
  int seeds = 5;
  bool median = false;  // aggregate by median instead of mean +/- stderr
};

Protocol protocol_for(const std::string& table) {
  if (table == "pendulum-fig3") {
    Protocol p;
    p.scene = "pendulum";
    p.models = {"cdl", "resnet", "vin-vv"};
    p.refs = {"0.538", "1.156", "0.509"};
    p.median = true;
    return p;
  }
  if (table == "ball-table1") {
    Protocol p;
    p.scene = "ball";
    p.models = {"resnet", "resnet-contact", "cdl"};
    p.refs = {"6.6 ± 1.2", "4.8 ± 0.8", "1.9 ± 1.0"};
    p.n_trajectories = 40;
    return p;
  }
  if (table == "cradle-table2") {
    Protocol p;
    p.scene = "cradle";
    p.models = {"resnet", "resnet-contact", "cdl"};
    p.refs = {"1.6 ± 0.1", "3.5 ± 1.3", "0.4 ± 0.1"};
    p.n_trajectories = 50;
    return p;
  }
  if (table == "ball-elastic") {
    Protocol p;
    p.scene = "ball";
    p.models = {"cdl"};
    p.refs = {"—"};
    p.elasticity = 0.7;
    p.seeds = 1;
    return p;
  }
  if (table == "cradle-no-touch") {
    Protocol p;
    p.scene = "cradle";
    p.models = {"cdl-no-touch"};
    p.refs = {"0.907"};
    p.sigma = 0.02;
    p.seeds = 1;
    return p;
  }
  throw ConfigError("unknown table '" + table +
                    "' (known: pendulum-fig3, ball-table1, cradle-table2, ball-elastic, "
                    "cradle-no-touch)");
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) /
         std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

std::string cmd_reproduce(const std::string& table, const ReproduceOverrides& ov) {
  const Protocol proto = protocol_for(table);
  const int seeds = ov.seeds > 0 ? ov.seeds : proto.seeds;

  std::string csv = "model,seed,rmse,status\n";
  std::string md = "# " + table + "\n\n";
  md += proto.median ? "| model | rmse (median of " + std::to_string(seeds) + " seeds) | reference |\n"
                     : "| model | rmse (mean ± stderr, " + std::to_string(seeds) + " seeds) | reference |\n";
  md += "|---|---|---|\n";

  int failures = 0;
  for (std::size_t mi = 0; mi < proto.models.size(); ++mi) {
    const std::string& model = proto.models[mi];
    std::vector<double> scores;
    for (int s = 0; s < seeds; ++s) {
      ExperimentConfig cfg = defaults_for(proto.scene, model);
      if (proto.n_trajectories > 0) cfg.n_trajectories = proto.n_trajectories;
      if (proto.sigma >= 0.0) cfg.sigma = proto.sigma;
      if (proto.elasticity >= 0.0) cfg.elasticity = proto.elasticity;
      if (ov.epochs > 0) cfg.training.epochs = ov.epochs;
      if (ov.n_trajectories > 0) cfg.n_trajectories = ov.n_trajectories;
      if (ov.test_windows > 0) cfg.test_windows = ov.test_windows;
      if (ov.test_len > 1) cfg.test_len = ov.test_len;
      if (!ov.hidden.empty()) cfg.hidden = ov.hidden;
      if (ov.elasticity >= 0.0) cfg.elasticity = ov.elasticity;
      cfg.out_dir = ov.out_dir;
      cfg.seed = static_cast<std::uint64_t>(s);
      cfg.training.seed = cfg.seed;

      try {
        const std::string dir = cmd_train(cfg);
        const ReportSummary rep = report_from_json(ad::read_text_file(dir + "/report.json"));
        if (rep.aborted) {
          ++failures;
          csv += model + "," + std::to_string(s) + ",nan,aborted\n";
          continue;
        }
        scores.push_back(rep.rmse);
        csv += model + "," + std::to_string(s) + "," + fmt(rep.rmse, "%.17g") + ",ok\n";
      } catch (const std::exception& ex) {
        ++failures;
        csv += model + "," + std::to_string(s) + ",nan,failed\n";
        std::fprintf(stderr, "[reproduce] %s seed %d failed: %s\n", model.c_str(), s, ex.what());
      }
    }

    std::string cell;
    if (scores.empty()) {
      cell = "(all runs failed)";
    } else if (proto.median) {
      cell = fmt(median_of(scores));
    } else if (scores.size() == 1) {
      cell = fmt(scores[0]);
    } else {
      cell = fmt(mean_of(scores)) + " ± " + fmt(stderr_of(scores));
    }
    if (!scores.empty() && static_cast<int>(scores.size()) < seeds) {
      cell += " (" + std::to_string(seeds - static_cast<int>(scores.size())) + " runs missing)";
    }
    md += "| " + model + " | " + cell + " | " + proto.refs[mi] + " |\n";
  }

  if (failures > 0) {
    md += "\n" + std::to_string(failures) + " sub-run(s) failed; see the CSV for per-seed status.\n";
  }

  const std::string tables_dir = ov.out_dir + "/tables";
  ensure_dir(tables_dir);
  ad::write_text_file(tables_dir + "/" + table + ".md", md);
  ad::write_text_file(tables_dir + "/" + table + ".csv", csv);
  std::fputs(md.c_str(), stdout);
  return md;
}

}  // namespace lab::harness
