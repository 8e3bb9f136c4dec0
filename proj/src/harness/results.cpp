#include "harness/results.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace harness {

namespace {

void open_or_throw(std::ofstream& os, const std::string& path) {
  os.open(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
}

void write_run_csv(const RunResult& r, const std::string& path) {
  std::ofstream os;
  open_or_throw(os, path);
  os << "period,welfare,running_avg,density_mse,entropy_mean,epsilon\n";
  for (const PeriodRecord& p : r.periods) {
    os << p.period << ',' << csv_number(p.welfare) << ','
       << csv_number(p.running_avg) << ',' << csv_number(p.density_mse) << ','
       << csv_number(p.entropy_mean) << ',' << csv_number(p.epsilon) << '\n';
  }
}

void write_agents_csv(const RunResult& r, const std::string& path) {
  std::ofstream os;
  open_or_throw(os, path);
  os << "period";
  for (int a = 0; a < r.num_agents; ++a) os << ",agent" << a;
  os << '\n';
  for (size_t p = 0; p < r.agent_revenue.size(); ++p) {
    os << (p + 1);
    for (double v : r.agent_revenue[p]) os << ',' << csv_number(v);
    os << '\n';
  }
}

void write_summary_stream(std::ofstream& os, const std::vector<RunResult>& runs) {
  os << "learner,seed,steps,converged_welfare,fairness_std,fairness_min,"
        "fairness_q1,fairness_median,fairness_q3,fairness_max,density_mse,"
        "entropy\n";
  for (const RunResult& r : runs) {
    os << r.learner << ',' << r.seed << ',' << r.steps << ','
       << csv_number(r.converged_welfare) << ',' << csv_number(r.fairness_std)
       << ',' << csv_number(r.fairness.min) << ',' << csv_number(r.fairness.q1)
       << ',' << csv_number(r.fairness.median) << ','
       << csv_number(r.fairness.q3) << ',' << csv_number(r.fairness.max) << ','
       << csv_number(r.density_mse_mean) << ',' << csv_number(r.entropy_mean)
       << '\n';
  }
}

}  // namespace

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_results(const ExperimentConfig& cfg,
                   const std::vector<RunResult>& runs, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os;
    open_or_throw(os, dir + "/manifest.cfg");
    os << format_config(cfg);
  }
  for (const RunResult& r : runs) {
    const std::string stem = r.learner + "_seed" + std::to_string(r.seed);
    write_run_csv(r, dir + "/run_" + stem + ".csv");
    write_agents_csv(r, dir + "/agents_" + stem + ".csv");
  }
  write_summary(runs, dir + "/summary.csv");
}

void write_summary(const std::vector<RunResult>& runs,
                   const std::string& path) {
  std::ofstream os;
  open_or_throw(os, path);
  write_summary_stream(os, runs);
}

}  // namespace harness
