#include "cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/verify.hpp"
#include "harness/config.hpp"
#include "harness/jobs.hpp"
#include "harness/results.hpp"
#include "harness/runner.hpp"
#include "numkit/optimizer.hpp"

namespace cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerify = 4;

void print_report(const verify::CheckReport& rep) {
  for (const std::string& line : rep.lines) std::printf("%s\n", line.c_str());
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void print_run_summary(const std::vector<harness::RunResult>& runs) {
  double welfare = 0.0, fairness = 0.0;
  for (const harness::RunResult& r : runs) {
    std::printf(
        "seed %llu: converged welfare %.6g, fairness std %.6g, wall %.1fs\n",
        static_cast<unsigned long long>(r.seed), r.converged_welfare,
        r.fairness_std, r.wall_seconds);
    welfare += r.converged_welfare;
    fairness += r.fairness_std;
  }
  if (runs.size() > 1)
    std::printf("mean over %zu seeds: welfare %.6g, fairness std %.6g\n",
                runs.size(), welfare / runs.size(), fairness / runs.size());
}

int run_config(harness::ExperimentConfig cfg, int jobs) {
  cfg.validate();
  std::vector<harness::RunResult> runs(cfg.seeds.size());
  std::vector<harness::Task> tasks;
  for (size_t i = 0; i < cfg.seeds.size(); ++i) {
    tasks.push_back(harness::Task{
        "seed " + std::to_string(cfg.seeds[i]),
        [&cfg, &runs, i] { runs[i] = harness::run_experiment(cfg, cfg.seeds[i]); }});
  }
  int parallel = jobs > 0 ? jobs
                          : std::min<int>(harness::default_task_parallelism(),
                                          static_cast<int>(tasks.size()));
  harness::run_tasks(tasks, parallel);
  harness::write_results(cfg, runs, cfg.out);
  std::printf("[%s] wrote %zu run(s) to %s\n", cfg.learner.c_str(),
              runs.size(), cfg.out.c_str());
  print_run_summary(runs);
  return kExitOk;
}

int run_sweep(const std::vector<std::string>& scenarios,
              const std::vector<std::string>& learner_names,
              const std::vector<std::string>& sets, const std::string& out,
              const std::string& seeds_csv, int jobs) {
  struct Group {
    harness::ExperimentConfig cfg;
    std::string dir;
    std::vector<harness::RunResult> runs;
  };
  std::vector<Group> groups;
  for (const std::string& path : scenarios) {
    harness::ExperimentConfig base = harness::parse_config_file(path);
    for (const std::string& name : learner_names) {
      Group g;
      g.cfg = base;
      g.cfg.learner = name;
      g.cfg.density_head = "auto";
      for (const std::string& s : sets) harness::apply_override(g.cfg, s);
      if (!seeds_csv.empty())
        harness::apply_override(g.cfg, "run.seeds=" + seeds_csv);
      std::string stem = std::filesystem::path(path).stem().string();
      g.dir = out + "/" + stem + "_" + name;
      g.cfg.out = g.dir;
      g.cfg.validate();
      g.runs.resize(g.cfg.seeds.size());
      groups.push_back(std::move(g));
    }
  }
  std::vector<harness::Task> tasks;
  for (Group& g : groups) {
    for (size_t i = 0; i < g.cfg.seeds.size(); ++i) {
      tasks.push_back(harness::Task{
          g.dir + " seed " + std::to_string(g.cfg.seeds[i]),
          [&g, i] { g.runs[i] = harness::run_experiment(g.cfg, g.cfg.seeds[i]); }});
    }
  }
  int parallel = jobs > 0 ? jobs
                          : std::min<int>(harness::default_task_parallelism(),
                                          static_cast<int>(tasks.size()));
  harness::run_tasks(tasks, parallel);
  std::vector<harness::RunResult> all;
  for (Group& g : groups) {
    harness::write_results(g.cfg, g.runs, g.dir);
    std::printf("[%s]\n", g.dir.c_str());
    print_run_summary(g.runs);
    all.insert(all.end(), g.runs.begin(), g.runs.end());
  }
  std::filesystem::create_directories(out);
  harness::write_summary(all, out + "/summary.csv");
  std::printf("sweep summary: %s/summary.csv\n", out.c_str());
  return kExitOk;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"matching-market reinforcement learning lab"};
  app.require_subcommand(1);

  std::string config_path, out, seeds_csv;
  std::vector<std::string> sets;
  int jobs = 0;
  CLI::App* run = app.add_subcommand("run", "train and evaluate one config");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--set", sets, "override, key=value (repeatable)");
  run->add_option("--out", out, "output directory override");
  run->add_option("--seeds", seeds_csv, "comma separated seed list");
  run->add_option("--jobs", jobs, "max parallel runs (default: cores)");

  std::string sweep_scenarios, sweep_learners, sweep_out = "sweep_out";
  std::string sweep_seeds;
  std::vector<std::string> sweep_sets;
  int sweep_jobs = 0;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run scenario x learner combinations");
  sweep->add_option("--scenarios", sweep_scenarios,
                    "comma separated config files")
      ->required();
  sweep->add_option("--learners", sweep_learners,
                    "comma separated learner names")
      ->required();
  sweep->add_option("--set", sweep_sets, "override applied to every combo");
  sweep->add_option("--out", sweep_out, "output root");
  sweep->add_option("--seeds", sweep_seeds, "comma separated seed list");
  sweep->add_option("--jobs", sweep_jobs, "max parallel runs");

  int trials = 160;
  uint64_t gc_seed = 20240817ull;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference checks of every training gradient");
  gradcheck->add_option("--trials", trials, "total random trials (>= 100)");
  gradcheck->add_option("--seed", gc_seed, "rng seed");

  std::string which = "all";
  bool quick = false;
  uint64_t oracle_seed = 93111ull;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "independent checks of simulator and learner behaviour");
  oracle->add_option("--which", which, "all, simulator, tabular or bandit")
      ->check(CLI::IsMember({"all", "simulator", "tabular", "bandit"}));
  oracle->add_flag("--quick", quick, "smaller sample sizes, looser bounds");
  oracle->add_option("--seed", oracle_seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      harness::ExperimentConfig cfg = harness::parse_config_file(config_path);
      for (const std::string& s : sets) harness::apply_override(cfg, s);
      if (!out.empty()) cfg.out = out;
      if (!seeds_csv.empty())
        harness::apply_override(cfg, "run.seeds=" + seeds_csv);
      return run_config(std::move(cfg), jobs);
    }
    if (sweep->parsed()) {
      return run_sweep(split_list(sweep_scenarios), split_list(sweep_learners),
                       sweep_sets, sweep_out, sweep_seeds, sweep_jobs);
    }
    if (gradcheck->parsed()) {
      if (trials < 100) {
        std::fprintf(stderr, "gradcheck: --trials must be >= 100\n");
        return kExitConfig;
      }
      verify::CheckReport rep = verify::gradcheck_suite(trials, gc_seed);
      print_report(rep);
      std::printf("gradcheck: %s\n", rep.ok ? "PASS" : "FAIL");
      return rep.ok ? kExitOk : kExitVerify;
    }
    if (oracle->parsed()) {
      verify::CheckReport all;
      auto merge = [&all](const verify::CheckReport& r) {
        all.ok = all.ok && r.ok;
        all.lines.insert(all.lines.end(), r.lines.begin(), r.lines.end());
      };
      if (which == "all" || which == "simulator")
        merge(verify::simulator_oracle(quick, oracle_seed));
      if (which == "all" || which == "tabular")
        merge(verify::tabular_oracle(quick, oracle_seed));
      if (which == "all" || which == "bandit")
        merge(verify::bandit_oracle(quick, oracle_seed));
      print_report(all);
      std::printf("oracle: %s\n", all.ok ? "PASS" : "FAIL");
      return all.ok ? kExitOk : kExitVerify;
    }
  } catch (const harness::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace cli
