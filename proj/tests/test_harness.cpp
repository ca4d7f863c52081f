#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "lab/commands.hpp"
#include "lab/config.hpp"
#include "lab/errors.hpp"
#include "lab/params.hpp"
#include "lab/report.hpp"
#include "lab/svgplot.hpp"

using namespace lab;
using namespace lab::harness;

namespace {

// A scratch output root, wiped per test case that uses it.
std::string fresh_out(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("lab_harness_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

// Small enough to train in milliseconds, large enough to hit every code path.
ExperimentConfig tiny_config(const std::string& scene, const std::string& model) {
  ExperimentConfig cfg = defaults_for(scene, model);
  cfg.n_trajectories = 2;
  cfg.window_len = 10;
  cfg.hidden = {8};
  cfg.training.epochs = 5;
  cfg.training.horizon = 5;
  cfg.training.batch = 2;
  cfg.test_windows = 2;
  cfg.test_len = 11;
  return cfg;
}

std::string slurp(const std::string& path) { return ad::read_text_file(path); }

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("experiment config: defaults, round-trip, hashing") {
  const ExperimentConfig ball = defaults_for("ball", "cdl");
  CHECK(ball.n_trajectories == 52);
  CHECK(ball.training.epochs == 2000);
  CHECK(ball.training.touch);
  CHECK(defaults_for("pendulum", "cdl").n_trajectories == 20);
  CHECK(defaults_for("pendulum", "cdl").training.epochs == 3000);
  CHECK(defaults_for("cradle", "cdl").n_trajectories == 54);
  CHECK_FALSE(defaults_for("cradle", "cdl-no-touch").training.touch);

  // Serialise → parse → serialise is the identity.
  ExperimentConfig cfg = tiny_config("cradle", "resnet-contact");
  cfg.seed = 7;
  cfg.sigma = 0.05;
  cfg.elasticity = 0.9;
  const std::string j1 = cfg.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(j1);
  CHECK(back.to_json() == j1);
  CHECK(back.seed == 7);
  CHECK(back.training.seed == 7);
  CHECK(back.hidden == std::vector<int>{8});

  // A partial file only overrides what it mentions.
  const ExperimentConfig part = ExperimentConfig::from_json(R"({"scene":"ball","model":"cdl"})");
  CHECK(part.n_trajectories == 52);
  CHECK(part.training.epochs == 2000);

  // The hash ignores the output root and tracks everything else.
  ExperimentConfig a = tiny_config("ball", "cdl");
  ExperimentConfig b = a;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(run_dir(a) != run_dir(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
  ExperimentConfig c = a;
  c.training.epochs += 1;
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
  CHECK(run_dir(a) == a.out_dir + "/ball/cdl/" + config_hash(a));
}

TEST_CASE("experiment config: validation rejects inconsistent setups") {
  CHECK_THROWS_AS(defaults_for("moon", "cdl"), ConfigError);
  CHECK_THROWS_AS(defaults_for("ball", "transformer"), ConfigError);

  ExperimentConfig vin = tiny_config("ball", "vin-vv");
  CHECK_THROWS_AS(vin.validate(), ConfigError);  // smooth integrator, contact scene

  ExperimentConfig nt = tiny_config("cradle", "cdl-no-touch");
  nt.training.touch = true;
  CHECK_THROWS_AS(nt.validate(), ConfigError);

  ExperimentConfig bad = tiny_config("ball", "cdl");
  bad.sigma = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = tiny_config("ball", "cdl");
  bad.training.horizon = 11;  // exceeds window_len
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = tiny_config("ball", "cdl");
  bad.elasticity = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  // Restitution override reaches the scene spec.
  ExperimentConfig el = tiny_config("ball", "cdl");
  el.elasticity = 0.7;
  CHECK(scene_for(el).e == doctest::Approx(0.7));
  CHECK(scene_for(tiny_config("ball", "cdl")).e == doctest::Approx(1.0));
}

TEST_CASE("report JSON round-trips every field the tables read") {
  ExperimentConfig cfg = tiny_config("ball", "cdl");
  train::RunReport rep;
  rep.losses = {{0.5, 0.25, 0.001}, {0.25, 0.125, 0.0005}};
  rep.completed_epochs = 2;
  rep.wall_seconds = 1.5;
  rep.eval.rmse = 0.123456789012345;
  rep.eval.rmse_noisy = 0.234;
  rep.eval.contact_accuracy = 0.97;
  rep.eval.diverged = true;
  rep.eval.energy = {1.0, 0.5, 0.25};

  const std::string hash = config_hash(cfg);
  const ReportSummary s = report_from_json(report_to_json(cfg, hash, rep));
  CHECK(s.scene == "ball");
  CHECK(s.model == "cdl");
  CHECK(s.hash == hash);
  CHECK(s.rmse == rep.eval.rmse);
  CHECK(s.rmse_noisy == rep.eval.rmse_noisy);
  CHECK(s.contact_accuracy == rep.eval.contact_accuracy);
  CHECK(s.diverged);
  CHECK_FALSE(s.aborted);
  CHECK(s.completed_epochs == 2);
  CHECK(s.wall_seconds == 1.5);
  CHECK(s.energy == rep.eval.energy);
  REQUIRE(s.losses.size() == 2);
  CHECK(s.losses[1].t == 0.25);
  CHECK(s.losses[1].c == 0.125);
  CHECK(s.losses[1].r == 0.0005);

  CHECK_THROWS_AS(report_from_json("{not json"), ConfigError);

  const std::string csv = losses_to_csv(rep.losses);
  CHECK(csv.substr(0, csv.find('\n')) == "epoch,L_T,L_C,L_R,total");
  CHECK(count_occurrences(csv, "\n") == 3);  // header + 2 epochs
  CHECK(csv.find("\n0,0.5,0.25,0.001,") != std::string::npos);
  CHECK(csv.find("\n1,0.25,0.125,0.0005") != std::string::npos);
}

TEST_CASE("svg chart: structure, escaping, gaps, and exact CSV") {
  std::vector<Series> series;
  series.push_back({"smooth", {0, 1, 2, 3}, {0.0, 1.0, 4.0, 9.0}});
  series.push_back({"gappy <a&b>", {0, 1, 2, 3}, {1.0, std::nan(""), 2.0, 3.0}});

  const std::string svg = line_chart_svg("title & frame", "time", "value", series);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  // The NaN splits the second series into two polylines.
  CHECK(count_occurrences(svg, "<polyline") == 3);
  CHECK(svg.find("title &amp; frame") != std::string::npos);
  CHECK(svg.find("gappy &lt;a&amp;b&gt;") != std::string::npos);
  CHECK(svg.find("time") != std::string::npos);
  CHECK(svg.find("value") != std::string::npos);

  // Degenerate y-range still renders (flat line).
  const std::string flat = line_chart_svg("flat", "x", "y", {{"c", {0, 1}, {2.0, 2.0}}});
  CHECK(flat.find("<polyline") != std::string::npos);

  CHECK_THROWS_AS(line_chart_svg("t", "x", "y", {}), ConfigError);
  CHECK_THROWS_AS(line_chart_svg("t", "x", "y", {{"bad", {0, 1}, {0}}}), ConfigError);

  // The CSV carries the plotted numbers verbatim at full precision.
  const std::string csv = series_to_csv({{"s", {0.1}, {2.0}}});
  CHECK(csv == "series,x,y\ns,0.10000000000000001,2\n");
}

TEST_CASE("cmd_generate writes a byte-deterministic dataset") {
  ExperimentConfig cfg = tiny_config("ball", "cdl");
  cfg.out_dir = fresh_out("gen_a");
  const std::string dir_a = cmd_generate(cfg);
  CHECK(file_exists(dir_a + "/dataset.json"));
  CHECK(file_exists(dir_a + "/dataset.csv"));

  cfg.out_dir = fresh_out("gen_b");
  const std::string dir_b = cmd_generate(cfg);
  CHECK(dir_a != dir_b);
  CHECK(slurp(dir_a + "/dataset.json") == slurp(dir_b + "/dataset.json"));
  CHECK(slurp(dir_a + "/dataset.csv") == slurp(dir_b + "/dataset.csv"));

  // The CSV has one row per (window, point) plus the header.
  const std::string csv = slurp(dir_a + "/dataset.csv");
  CHECK(count_occurrences(csv, "\n") == 1 + cfg.n_trajectories * cfg.window_len);
  CHECK(csv.substr(0, csv.find('\n')) == "window,point,t,q_1,v_1,c_1");
}

TEST_CASE("cmd_train produces artifacts, reuses completed runs, and reproduces") {
  ExperimentConfig cfg = tiny_config("ball", "cdl");
  cfg.out_dir = fresh_out("train_a");
  const std::string dir = cmd_train(cfg);
  for (const char* name : {"dataset.json", "checkpoint.json", "report.json", "losses.csv"}) {
    CHECK(file_exists(dir + "/" + std::string(name)));
  }
  const ReportSummary rep = report_from_json(slurp(dir + "/report.json"));
  CHECK(rep.completed_epochs == 5);
  CHECK_FALSE(rep.aborted);
  CHECK(rep.losses.size() == 5);
  CHECK(std::isfinite(rep.rmse));
  CHECK(rep.hash == config_hash(cfg));

  // Re-running the same config must not retrain or touch the artifacts.
  const std::string report_before = slurp(dir + "/report.json");
  const std::string ckpt_before = slurp(dir + "/checkpoint.json");
  CHECK(cmd_train(cfg) == dir);
  CHECK(slurp(dir + "/report.json") == report_before);
  CHECK(slurp(dir + "/checkpoint.json") == ckpt_before);

  // A fresh run of the identical experiment lands on the same final RMSE.
  cfg.out_dir = fresh_out("train_b");
  const std::string dir2 = cmd_train(cfg);
  const ReportSummary rep2 = report_from_json(slurp(dir2 + "/report.json"));
  CHECK(std::abs(rep2.rmse - rep.rmse) < 1e-10);
}

TEST_CASE("cmd_eval re-scores the checkpoint to the trained report's numbers") {
  ExperimentConfig cfg = tiny_config("ball", "resnet-contact");
  cfg.out_dir = fresh_out("eval");
  const std::string dir = cmd_train(cfg);
  const ReportSummary trained = report_from_json(slurp(dir + "/report.json"));

  CHECK(cmd_eval(cfg) == dir);
  const ReportSummary rescored = report_from_json(slurp(dir + "/report.json"));
  CHECK(std::abs(rescored.rmse - trained.rmse) < 1e-12);
  CHECK(std::abs(rescored.rmse_noisy - trained.rmse_noisy) < 1e-12);
  CHECK(rescored.contact_accuracy == trained.contact_accuracy);
  CHECK(rescored.completed_epochs == trained.completed_epochs);  // history kept
  CHECK(rescored.losses.size() == trained.losses.size());

  // Eval without a checkpoint is a configuration error.
  ExperimentConfig missing = tiny_config("ball", "cdl");
  missing.out_dir = fresh_out("eval_missing");
  CHECK_THROWS_AS(cmd_eval(missing), ConfigError);
}

TEST_CASE("cmd_plot emits the panel set the model supports") {
  ExperimentConfig cfg = tiny_config("ball", "cdl");
  cfg.out_dir = fresh_out("plot");
  const std::string dir = cmd_train(cfg);
  cmd_plot(cfg);
  for (const char* name : {"phase", "energy", "potential", "contact"}) {
    CHECK(file_exists(dir + "/" + std::string(name) + ".svg"));
    CHECK(file_exists(dir + "/" + std::string(name) + ".csv"));
  }
  // The potential CSV holds both the true and the learned gradient series.
  const std::string pot = slurp(dir + "/potential.csv");
  CHECK(pot.find("true dV/dq") != std::string::npos);
  CHECK(pot.find("learned dV/dq") != std::string::npos);

  // Pure residual baseline: no potential, no contact net.
  ExperimentConfig rn = tiny_config("ball", "resnet");
  rn.out_dir = cfg.out_dir;
  const std::string rdir = cmd_train(rn);
  cmd_plot(rn);
  CHECK(file_exists(rdir + "/phase.svg"));
  CHECK(file_exists(rdir + "/energy.svg"));
  CHECK_FALSE(file_exists(rdir + "/potential.svg"));
  CHECK_FALSE(file_exists(rdir + "/contact.svg"));

  // Smooth integrator on the pendulum: potential panel, no contact panel.
  ExperimentConfig vin = tiny_config("pendulum", "vin-vv");
  vin.out_dir = cfg.out_dir;
  const std::string vdir = cmd_train(vin);
  cmd_plot(vin);
  CHECK(file_exists(vdir + "/potential.svg"));
  CHECK_FALSE(file_exists(vdir + "/contact.svg"));

  CHECK_THROWS_AS(cmd_plot(tiny_config("cradle", "cdl")), ConfigError);  // nothing trained
}

TEST_CASE("cmd_reproduce runs a scaled-down table end to end") {
  ReproduceOverrides ov;
  ov.epochs = 2;
  ov.n_trajectories = 2;
  ov.seeds = 2;
  ov.test_windows = 2;
  ov.test_len = 11;
  ov.hidden = {8};
  ov.out_dir = fresh_out("repro");

  const std::string md = cmd_reproduce("ball-table1", ov);
  CHECK(md.find("# ball-table1") != std::string::npos);
  for (const char* model : {"resnet", "resnet-contact", "cdl"}) {
    CHECK(md.find("| " + std::string(model) + " |") != std::string::npos);
  }
  CHECK(md.find("±") != std::string::npos);
  CHECK(md.find("6.6 ± 1.2") != std::string::npos);  // reference column

  CHECK(file_exists(ov.out_dir + "/tables/ball-table1.md"));
  const std::string csv = slurp(ov.out_dir + "/tables/ball-table1.csv");
  CHECK(count_occurrences(csv, ",ok") == 6);  // 3 models x 2 seeds
  CHECK(csv.substr(0, csv.find('\n')) == "model,seed,rmse,status");

  // Re-running reuses every completed run directory (same bytes, no retrain).
  const std::string md2 = cmd_reproduce("ball-table1", ov);
  CHECK(md2 == md);

  CHECK_THROWS_AS(cmd_reproduce("ball-table9", ov), ConfigError);
}
