// lab — dataset generation, training, evaluation, benchmark tables, plots.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lab/commands.hpp"
#include "lab/config.hpp"
#include "lab/errors.hpp"
#include "lab/params.hpp"

namespace {

using lab::harness::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string scene = "pendulum";
  std::string model = "cdl";
  std::uint64_t seed = 0;
  int epochs = 0;
  double sigma = 0.0;
  double lr = 0.0;
  double lambda_reg = 0.0;
  double elasticity = -1.0;
  bool no_touch = false;
  bool jitter_ic = false;
  std::string out_dir = "runs";
  int n_trajectories = 0;
  int window_len = 0;
  std::vector<int> hidden;
  int horizon = 0;
  int batch = 0;
  int test_windows = 0;
  int test_len = 0;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config file (flags override its fields)");
  sub->add_option("--scene", f.scene, "pendulum | ball | cradle");
  sub->add_option("--model", f.model, "cdl | cdl-no-touch | resnet | resnet-contact | vin-vv");
  sub->add_option("--seed", f.seed, "master seed (dataset, init, shuffling)");
  sub->add_option("--epochs", f.epochs, "training epochs");
  sub->add_option("--sigma", f.sigma, "observation noise scale");
  sub->add_option("--lr", f.lr, "Adam learning rate");
  sub->add_option("--lambda", f.lambda_reg, "weight-regulariser strength");
  sub->add_option("--elasticity", f.elasticity, "restitution override in [0, 1]");
  sub->add_flag("--no-touch", f.no_touch, "train without observed contact flags");
  sub->add_flag("--jitter-ic", f.jitter_ic, "independent perturbed-IC windows");
  sub->add_option("--out", f.out_dir, "output root directory");
  sub->add_option("--trajectories", f.n_trajectories, "number of training windows");
  sub->add_option("--window", f.window_len, "points per training window");
  sub->add_option("--hidden", f.hidden, "hidden layer widths")->expected(-1);
  sub->add_option("--horizon", f.horizon, "points per training rollout");
  sub->add_option("--batch", f.batch, "windows per optimizer step");
  sub->add_option("--test-windows", f.test_windows, "held-out windows");
  sub->add_option("--test-len", f.test_len, "points per held-out window");
}

ExperimentConfig build_config(const CLI::App* sub, const CommonFlags& f) {
  ExperimentConfig cfg;
  if (sub->count("--config") > 0) {
    cfg = ExperimentConfig::from_json(lab::ad::read_text_file(f.config_path));
    if (sub->count("--scene") > 0) cfg.scene = f.scene;
    if (sub->count("--model") > 0) cfg.model = f.model;
  } else {
    cfg = lab::harness::defaults_for(sub->count("--scene") > 0 ? f.scene : cfg.scene,
                                     sub->count("--model") > 0 ? f.model : cfg.model);
  }
  if (sub->count("--seed") > 0) cfg.seed = f.seed;
  if (sub->count("--epochs") > 0) cfg.training.epochs = f.epochs;
  if (sub->count("--sigma") > 0) cfg.sigma = f.sigma;
  if (sub->count("--lr") > 0) cfg.training.lr = f.lr;
  if (sub->count("--lambda") > 0) cfg.training.lambda_reg = f.lambda_reg;
  if (sub->count("--elasticity") > 0) cfg.elasticity = f.elasticity;
  if (sub->count("--out") > 0) cfg.out_dir = f.out_dir;
  if (sub->count("--trajectories") > 0) cfg.n_trajectories = f.n_trajectories;
  if (sub->count("--window") > 0) cfg.window_len = f.window_len;
  if (sub->count("--hidden") > 0) cfg.hidden = f.hidden;
  if (sub->count("--horizon") > 0) cfg.training.horizon = f.horizon;
  if (sub->count("--batch") > 0) cfg.training.batch = f.batch;
  if (sub->count("--test-windows") > 0) cfg.test_windows = f.test_windows;
  if (sub->count("--test-len") > 0) cfg.test_len = f.test_len;
  if (sub->count("--jitter-ic") > 0) cfg.jitter_ic = true;
  if (f.no_touch) {
    cfg.training.touch = false;
    if (cfg.model == "cdl") cfg.model = "cdl-no-touch";
  }
  cfg.training.seed = cfg.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentiable contact-dynamics laboratory"};
  app.require_subcommand(1);

  CommonFlags f;
  CLI::App* gen = app.add_subcommand("generate", "simulate a dataset");
  CLI::App* train = app.add_subcommand("train", "train a model and write its report");
  CLI::App* eval = app.add_subcommand("eval", "re-score an existing checkpoint");
  CLI::App* plot = app.add_subcommand("plot", "emit SVG/CSV figures for a trained run");
  add_common(gen, f);
  add_common(train, f);
  add_common(eval, f);
  add_common(plot, f);

  CLI::App* repro = app.add_subcommand("reproduce", "run a benchmark table end to end");
  std::string table;
  lab::harness::ReproduceOverrides ov;
  repro->add_option("table", table,
                    "pendulum-fig3 | ball-table1 | cradle-table2 | ball-elastic | cradle-no-touch")
      ->required();
  repro->add_option("--epochs", ov.epochs, "override training epochs");
  repro->add_option("--trajectories", ov.n_trajectories, "override training windows");
  repro->add_option("--seeds", ov.seeds, "override seed count");
  repro->add_option("--test-windows", ov.test_windows, "override held-out windows");
  repro->add_option("--test-len", ov.test_len, "override held-out window length");
  repro->add_option("--hidden", ov.hidden, "override hidden widths")->expected(-1);
  repro->add_option("--elasticity", ov.elasticity, "override restitution");
  repro->add_option("--out", ov.out_dir, "output root directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(gen)) {
      lab::harness::cmd_generate(build_config(gen, f));
    } else if (app.got_subcommand(train)) {
      lab::harness::cmd_train(build_config(train, f));
    } else if (app.got_subcommand(eval)) {
      lab::harness::cmd_eval(build_config(eval, f));
    } else if (app.got_subcommand(plot)) {
      lab::harness::cmd_plot(build_config(plot, f));
    } else if (app.got_subcommand(repro)) {
      lab::harness::cmd_reproduce(table, ov);
    }
  } catch (const lab::ConfigError& ex) {
    std::fprintf(stderr, "configuration error: %s\n", ex.what());
    return 2;
  } catch (const lab::NumericalError& ex) {
    std::fprintf(stderr, "numerical failure: %s\n", ex.what());
    return 3;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
