#pragma once
// Runs one seeded experiment: training for the configured number of steps,
// then a converged window with exploration frozen and training stopped.

#include <cstdint>

#include "harness/config.hpp"
#include "harness/metrics.hpp"

namespace harness {

RunResult run_experiment(const ExperimentConfig& cfg, uint64_t seed);

}  // namespace harness
