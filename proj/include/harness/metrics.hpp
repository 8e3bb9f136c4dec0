#pragma once
// Per-period measurements of a run and the derived converged statistics.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace harness {

struct Quartiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Linear interpolation between order statistics.
Quartiles quartiles(std::vector<double> values);

double social_welfare(std::span<const double> per_agent_revenue);

struct PeriodRecord {
  long long period = 0;
  double welfare = 0.0;      // mean per-agent revenue this period
  double running_avg = 0.0;  // over the trailing 100 periods
  double density_mse = 0.0;  // nan when no occupancy estimate is trained
  double entropy_mean = 0.0; // nan likewise
  double epsilon = 0.0;      // exploration schedule at period end
};

struct RunResult {
  std::string learner;
  uint64_t seed = 0;
  long long steps = 0;
  long long training_periods = 0;
  int num_agents = 0;
  std::vector<PeriodRecord> periods;
  std::vector<std::vector<double>> agent_revenue;  // [period][agent]

  // Over the final converged window.
  std::vector<double> converged_agent_means;
  double converged_welfare = 0.0;
  double fairness_std = 0.0;
  Quartiles fairness;
  double density_mse_mean = 0.0;
  double entropy_mean = 0.0;

  double wall_seconds = 0.0;  // not written to files
};

// Fills the converged block from the last `converged_periods` records.
void finalize_run(RunResult& r, int converged_periods);

}  // namespace harness
