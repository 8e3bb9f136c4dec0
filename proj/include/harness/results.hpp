#pragma once
// CSV and manifest output. Files are byte-stable: rerunning the written
// manifest reproduces them exactly.

#include <string>
#include <vector>

#include "harness/config.hpp"
#include "harness/metrics.hpp"

namespace harness {

// Writes manifest.cfg, run_<learner>_seed<seed>.csv,
// agents_<learner>_seed<seed>.csv and summary.csv under `dir`.
void write_results(const ExperimentConfig& cfg,
                   const std::vector<RunResult>& runs, const std::string& dir);

// Summary rows only, for aggregating a sweep.
void write_summary(const std::vector<RunResult>& runs, const std::string& path);

std::string csv_number(double v);  // "%.12g", non-finite becomes "nan"

}  // namespace harness
