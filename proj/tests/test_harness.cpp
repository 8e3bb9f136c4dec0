#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "harness/config.hpp"
#include "harness/metrics.hpp"
#include "harness/results.hpp"
#include "harness/runner.hpp"

using namespace harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.learner = "tabq";
  cfg.env.grid_width = 3;
  cfg.env.grid_height = 2;
  cfg.env.num_agents = 10;
  cfg.env.dar = 0.6;
  cfg.steps = 600;
  cfg.eval_period = 100;
  cfg.converged_periods = 3;
  cfg.seeds = {7};
  cfg.hp.hidden = {8};
  cfg.hp.dropout = 0.25;
  cfg.hp.batch_size = 8;
  cfg.hp.replay_capacity = 2000;
  cfg.hp.replay_min_fill = 50;
  cfg.hp.train_period = 2;
  cfg.hp.lr = 1e-3;
  return cfg;
}

}  // namespace

TEST_CASE("quartile and welfare arithmetic") {
  Quartiles q = quartiles({4.0, 1.0, 3.0, 2.0});
  CHECK(q.min == doctest::Approx(1.0));
  CHECK(q.q1 == doctest::Approx(1.75));
  CHECK(q.median == doctest::Approx(2.5));
  CHECK(q.q3 == doctest::Approx(3.25));
  CHECK(q.max == doctest::Approx(4.0));
  Quartiles one = quartiles({2.5});
  CHECK(one.min == doctest::Approx(2.5));
  CHECK(one.median == doctest::Approx(2.5));
  CHECK(one.max == doctest::Approx(2.5));
  CHECK_THROWS(quartiles({}));
  std::vector<double> rev{1.0, 2.0, 6.0};
  CHECK(social_welfare(rev) == doctest::Approx(3.0));
}

TEST_CASE("converged window statistics from hand-filled periods") {
  RunResult r;
  r.num_agents = 2;
  r.agent_revenue = {{1, 3}, {2, 4}, {4, 8}};
  for (double w : {2.0, 3.0, 6.0}) {
    PeriodRecord p;
    p.welfare = w;
    p.density_mse = std::nan("");
    p.entropy_mean = std::nan("");
    r.periods.push_back(p);
  }
  finalize_run(r, 2);
  CHECK(r.converged_agent_means[0] == doctest::Approx(3.0));
  CHECK(r.converged_agent_means[1] == doctest::Approx(6.0));
  CHECK(r.converged_welfare == doctest::Approx(4.5));
  CHECK(r.fairness_std == doctest::Approx(1.5));
  CHECK(r.fairness.min == doctest::Approx(3.0));
  CHECK(r.fairness.max == doctest::Approx(6.0));
  CHECK(std::isnan(r.density_mse_mean));
  CHECK(std::isnan(r.entropy_mean));
}

TEST_CASE("csv numbers are short, stable and nan-safe") {
  CHECK(csv_number(0.1) == "0.1");
  CHECK(csv_number(3.0) == "3");
  CHECK(csv_number(-2.5) == "-2.5");
  CHECK(csv_number(std::nan("")) == "nan");
  CHECK(csv_number(INFINITY) == "nan");
  CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("config formatting round-trips through the parser") {
  ExperimentConfig cfg = tiny_config();
  cfg.env.zone_rates = {0.25, 0.5, 0.0, 0.125, 1.0, 0.1};
  cfg.env.arrival = matchenv::ArrivalSchedule::sine;
  cfg.env.trip_pattern = matchenv::TripPattern::non_uniform;
  cfg.hp.alpha_anneal = true;
  cfg.density_head = "on";
  cfg.learner = "dqn";
  cfg.seeds = {3, 9, 27};
  std::string text = format_config(cfg);

  ExperimentConfig back;
  std::istringstream in(text);
  apply_config_stream(back, in, "roundtrip");
  CHECK(format_config(back) == text);
  CHECK(back.env.zone_rates == cfg.env.zone_rates);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.hp.alpha_anneal);
  CHECK(back.density_head == "on");
}

TEST_CASE("config files accept comments and report precise errors") {
  ExperimentConfig cfg;
  std::istringstream good(
      "# experiment\n"
      "learner = dedqn\n"
      "\n"
      "env.num_agents = 50   # desk size\n"
      "hp.hidden = 32, 32\n"
      "run.seeds = 1,2\n");
  apply_config_stream(cfg, good, "good.cfg");
  CHECK(cfg.learner == "dedqn");
  CHECK(cfg.env.num_agents == 50);
  CHECK(cfg.hp.hidden == std::vector<int>{32, 32});
  CHECK(cfg.seeds == std::vector<uint64_t>{1, 2});

  auto fails_with = [](const std::string& text, const std::string& needle) {
    ExperimentConfig c;
    std::istringstream in(text);
    try {
      apply_config_stream(c, in, "bad.cfg");
      FAIL_CHECK("expected a config error for: " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  fails_with("no_such_key = 1\n", "unknown key 'no_such_key'");
  fails_with("\nenv.dar = fast\n", "bad.cfg:2");
  fails_with("env.dar = fast\n", "'env.dar'");
  fails_with("hp.batch_size = 3.5\n", "integer");
  fails_with("learner dqn\n", "expected 'key = value'");
  fails_with("env.arrival = weekly\n", "env.arrival");

  CHECK_THROWS_AS(parse_config_file("does_not_exist.cfg"), ConfigError);
}

TEST_CASE("command-line overrides reuse the schema") {
  ExperimentConfig cfg = tiny_config();
  apply_override(cfg, "run.steps=1200");
  CHECK(cfg.steps == 1200);
  apply_override(cfg, "hp.gamma = 0.9");
  CHECK(cfg.hp.gamma == doctest::Approx(0.9));
  apply_override(cfg, "run.seeds=11,12,13");
  CHECK(cfg.seeds.size() == 3);
  CHECK_THROWS_AS(apply_override(cfg, "run.steps"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "bogus=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "hp.gamma=two"), ConfigError);
}

TEST_CASE("config validation catches cross-field mistakes") {
  ExperimentConfig cfg = tiny_config();
  cfg.validate();
  cfg.steps = 650;  // not a multiple of the evaluation period
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.learner = "dedqn";
  cfg.density_head = "off";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.learner = "mmfq";
  cfg.density_head = "on";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.learner = "qlearner";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("a small experiment runs end to end") {
  ExperimentConfig cfg = tiny_config();
  cfg.validate();
  RunResult r = run_experiment(cfg, 7);
  CHECK(r.learner == "tabq");
  CHECK(r.seed == 7);
  CHECK(r.training_periods == 6);
  REQUIRE(r.periods.size() == 6);  // converged window = the last 3 of these
  REQUIRE(r.agent_revenue.size() == 6);
  for (const auto& row : r.agent_revenue) CHECK(row.size() == 10);
  CHECK(r.periods.front().epsilon > cfg.hp.epsilon_floor);
  // The schedule bottoms out at half budget, so the second half of the run
  // (and with it the whole converged window) sits at the floor.
  CHECK(r.periods[2].epsilon == doctest::Approx(cfg.hp.epsilon_floor));
  CHECK(r.periods.back().epsilon == doctest::Approx(cfg.hp.epsilon_floor));
  CHECK(r.converged_welfare > 0.0);
  CHECK(std::isnan(r.density_mse_mean));  // no occupancy estimate in tabq
  for (const PeriodRecord& p : r.periods) {
    CHECK(p.welfare >= 0.0);
    CHECK(std::isfinite(p.running_avg));
  }
  CHECK(r.wall_seconds >= 0.0);
}

TEST_CASE("turning the extension terms off reproduces the base learner bit for bit") {
  ExperimentConfig base = tiny_config();
  base.learner = "dqn";
  base.density_head = "on";  // same architecture as the extended variant
  base.steps = 800;
  base.eval_period = 100;
  base.converged_periods = 2;
  base.env.num_agents = 8;
  base.hp.replay_min_fill = 20;  // training active for most of the run

  SUBCASE("q variant") {
    ExperimentConfig ext = base;
    ext.learner = "dedqn";
    ext.density_head = "auto";
    ext.hp.beta = 0.0;
    ext.hp.lambda = 0.0;
    RunResult a = run_experiment(base, 5);
    RunResult b = run_experiment(ext, 5);
    REQUIRE(a.periods.size() == b.periods.size());
    for (size_t i = 0; i < a.periods.size(); ++i)
      CHECK(a.periods[i].welfare == b.periods[i].welfare);  // exact
    CHECK(a.agent_revenue == b.agent_revenue);
    CHECK(a.converged_welfare == b.converged_welfare);
  }

  SUBCASE("actor-critic variant") {
    base.learner = "a2c";
    ExperimentConfig ext = base;
    ext.learner = "dea2c";
    ext.density_head = "auto";
    ext.hp.beta = 0.0;
    ext.hp.lambda = 0.0;
    RunResult a = run_experiment(base, 5);
    RunResult b = run_experiment(ext, 5);
    REQUIRE(a.periods.size() == b.periods.size());
    for (size_t i = 0; i < a.periods.size(); ++i)
      CHECK(a.periods[i].welfare == b.periods[i].welfare);
    CHECK(a.agent_revenue == b.agent_revenue);
  }

  SUBCASE("nonzero weights change the trajectory") {
    // Detection probe only: the weights are cranked far above the defaults
    // so the perturbed targets flip greedy actions within a short run.
    ExperimentConfig ext = base;
    ext.learner = "dedqn";
    ext.density_head = "auto";
    ext.hp.beta = 1.0;
    ext.hp.lambda = 1.0;
    RunResult a = run_experiment(base, 5);
    RunResult b = run_experiment(ext, 5);
    bool any_diff = false;
    for (size_t i = 0; i < a.periods.size(); ++i)
      any_diff |= a.periods[i].welfare != b.periods[i].welfare;
    CHECK(any_diff);
  }
}

TEST_CASE("density columns are live exactly for the estimating learners") {
  ExperimentConfig cfg = tiny_config();
  cfg.learner = "dedqn";
  cfg.steps = 400;
  cfg.eval_period = 100;
  cfg.converged_periods = 2;
  cfg.env.num_agents = 8;
  cfg.hp.replay_min_fill = 40;
  RunResult r = run_experiment(cfg, 9);
  CHECK(std::isfinite(r.density_mse_mean));
  CHECK(std::isfinite(r.entropy_mean));
  CHECK(r.density_mse_mean >= 0.0);
  CHECK(r.entropy_mean >= 0.0);
  CHECK(r.entropy_mean <= std::log(6.0) + 1e-9);  // 6 zones
}

TEST_CASE("results directory replays byte for byte from its manifest") {
  const fs::path dir1 = "tmp_results_a";
  const fs::path dir2 = "tmp_results_b";
  fs::remove_all(dir1);
  fs::remove_all(dir2);

  ExperimentConfig cfg = tiny_config();
  cfg.out = dir1.string();
  cfg.validate();
  std::vector<RunResult> runs{run_experiment(cfg, 7)};
  write_results(cfg, runs, cfg.out);

  REQUIRE(fs::exists(dir1 / "manifest.cfg"));
  REQUIRE(fs::exists(dir1 / "run_tabq_seed7.csv"));
  REQUIRE(fs::exists(dir1 / "agents_tabq_seed7.csv"));
  REQUIRE(fs::exists(dir1 / "summary.csv"));

  ExperimentConfig replay = parse_config_file((dir1 / "manifest.cfg").string());
  replay.out = dir2.string();
  replay.validate();
  std::vector<RunResult> reruns{run_experiment(replay, replay.seeds[0])};
  write_results(replay, reruns, replay.out);

  for (const char* name :
       {"run_tabq_seed7.csv", "agents_tabq_seed7.csv", "summary.csv"}) {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }
  // Sanity: the run file has one row per period plus the header.
  std::string text = slurp(dir1 / "run_tabq_seed7.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}
