#pragma once
// Self-contained verification suites: finite-difference gradient checks and
// independent oracles for the simulator, the tabular learner and the
// actor-critic update. Shared by the CLI and the acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

namespace verify {

struct CheckReport {
  bool ok = true;
  std::vector<std::string> lines;

  void note(const std::string& line) { lines.push_back(line); }
  void check(bool pass, const std::string& line);
};

// Compares analytic gradients of every loss kernel (and the raw backward
// pass) against central finite differences on small random networks.
CheckReport gradcheck_suite(int trials, uint64_t seed);

// Assignment anonymity, realized demand rates and a conservation fuzz run.
CheckReport simulator_oracle(bool quick, uint64_t seed);

// Table Q-learning on a two-zone instance versus value iteration on the
// exact decision process.
CheckReport tabular_oracle(bool quick, uint64_t seed);

// Actor-critic as a two-armed bandit: the policy must concentrate on the
// rewarding arm.
CheckReport bandit_oracle(bool quick, uint64_t seed);

}  // namespace verify
