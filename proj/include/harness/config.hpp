#pragma once
// Experiment configuration: flat `key = value` files with '#' comments.
// A single schema drives parsing, command-line overrides and manifest
// output, so a written manifest always replays to the same run.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "learners/factory.hpp"
#include "learners/learner.hpp"
#include "matchenv/world.hpp"

namespace harness {

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  matchenv::EnvConfig env;
  std::string learner = "dqn";
  learners::HyperParams hp;
  std::string density_head = "auto";  // auto | on | off
  bool shared_brain = false;
  long long steps = 200000;
  int eval_period = 1000;
  int converged_periods = 100;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out = "out";

  learners::LearnerKind kind() const;  // throws ConfigError on bad name
  int density_head_flag() const;       // -1 auto, 0 off, 1 on
  void validate() const;               // throws ConfigError
};

ExperimentConfig parse_config_file(const std::string& path);
void apply_config_stream(ExperimentConfig& cfg, std::istream& in,
                         const std::string& origin);
// One "key=value" assignment, e.g. from a --set flag.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
// Full config text in schema order; parsing it back reproduces `cfg`.
std::string format_config(const ExperimentConfig& cfg);

const std::vector<std::string>& config_keys();

}  // namespace harness
