// Times a batch of independent seeded runs through the serial reference
// executor and the parallel one, checks that both produce identical results,
// and prints the speedup table. Usage: bench_runs [tasks] [steps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "harness/config.hpp"
#include "harness/jobs.hpp"
#include "harness/runner.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double run_batch(const harness::ExperimentConfig& cfg, int num_tasks,
                 int workers, std::vector<double>& welfare) {
  std::vector<harness::RunResult> runs(num_tasks);
  std::vector<harness::Task> tasks;
  for (int i = 0; i < num_tasks; ++i) {
    uint64_t seed = 1000 + i;
    tasks.push_back(harness::Task{"seed " + std::to_string(seed), [&, i, seed] {
                                    runs[i] = harness::run_experiment(cfg, seed);
                                  }});
  }
  Clock::time_point t0 = Clock::now();
  harness::run_tasks(tasks, workers);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  welfare.clear();
  for (const harness::RunResult& r : runs) welfare.push_back(r.converged_welfare);
  return secs;
}

}  // namespace

int main(int argc, char** argv) {
  int num_tasks = argc > 1 ? std::atoi(argv[1]) : 8;
  long long steps = argc > 2 ? std::atoll(argv[2]) : 4000;
  if (num_tasks < 1 || steps < 100) {
    std::fprintf(stderr, "usage: bench_runs [tasks >= 1] [steps >= 100]\n");
    return 1;
  }

  harness::ExperimentConfig cfg;
  cfg.learner = "dqn";
  cfg.env.grid_width = 5;
  cfg.env.grid_height = 2;
  cfg.env.num_agents = 20;
  cfg.env.dar = 0.6;
  cfg.hp.hidden = {16, 16};
  cfg.hp.dropout = 0.25;
  cfg.hp.batch_size = 16;
  cfg.hp.train_period = 6;
  cfg.hp.replay_min_fill = 500;
  cfg.steps = steps - steps % 1000 + (steps % 1000 ? 1000 : 0);
  cfg.eval_period = 1000;
  cfg.converged_periods = 2;
  cfg.validate();

  std::printf("batch: %d runs of %lld training steps each\n", num_tasks,
              cfg.steps);
  std::vector<double> reference;
  double serial = run_batch(cfg, num_tasks, 1, reference);
  std::printf("%8s  %10s  %8s\n", "workers", "seconds", "speedup");
  std::printf("%8d  %10.2f  %8.2fx\n", 1, serial, 1.0);

  int max_workers = harness::default_task_parallelism();
  for (int workers = 2; workers <= max_workers; workers *= 2) {
    std::vector<double> welfare;
    double secs = run_batch(cfg, num_tasks, workers, welfare);
    if (welfare != reference) {
      std::fprintf(stderr,
                   "parallel results diverged from the serial reference\n");
      return 1;
    }
    std::printf("%8d  %10.2f  %8.2fx\n", workers, secs, serial / secs);
  }
  if (max_workers < 2)
    std::printf("(single hardware thread: parallel path exercised only by "
                "the test suite)\n");
  return 0;
}
