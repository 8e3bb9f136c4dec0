#include "learners/factory.hpp"

#include <cmath>
#include <stdexcept>

namespace learners {

void HyperParams::validate() const {
  auto bad = [](const std::string& what) {
    throw std::runtime_error("hyperparams: " + what);
  };
  if (!(gamma >= 0.0) || gamma >= 1.0) bad("gamma must be in [0, 1)");
  if (!(lr > 0.0)) bad("lr must be > 0");
  if (!(lr_policy > 0.0)) bad("lr_policy must be > 0");
  if (!(lr_value > 0.0)) bad("lr_value must be > 0");
  if (beta < 0.0) bad("beta must be >= 0");
  if (lambda < 0.0) bad("lambda must be >= 0");
  if (!(epsilon_start > 0.0) || epsilon_start > 1.0)
    bad("epsilon_start must be in (0, 1]");
  if (!(epsilon_floor > 0.0) || epsilon_floor > epsilon_start)
    bad("epsilon_floor must be in (0, epsilon_start]");
  if (replay_capacity < 1) bad("replay_capacity must be >= 1");
  if (replay_min_fill < 1) bad("replay_min_fill must be >= 1");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (target_sync < 1) bad("target_sync must be >= 1");
  if (k_step < 1) bad("k_step must be >= 1");
  if (!(alpha > 0.0) || alpha > 1.0) bad("alpha must be in (0, 1]");
  if (hidden.empty()) bad("hidden must list at least one layer");
  for (int h : hidden)
    if (h < 1) bad("hidden sizes must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) bad("dropout must be in [0, 1)");
  if (train_period < 1) bad("train_period must be >= 1");
  if (density_buckets < 1) bad("density_buckets must be >= 1");
}

double epsilon_at(long long step, long long budget, double start,
                  double floor) {
  if (step < 0) step = 0;
  if (budget <= 0 || start <= floor) return floor;
  // The floor is hit at half budget so converged-window statistics are
  // collected with exploration already settled at its final rate.
  double tau = 0.5 * static_cast<double>(budget) / std::log(start / floor);
  double e = start * std::exp(-static_cast<double>(step) / tau);
  return e < floor ? floor : e;
}

LearnerKind learner_kind_from(const std::string& name) {
  if (name == "tabq") return LearnerKind::tabq;
  if (name == "dqn") return LearnerKind::dqn;
  if (name == "a2c") return LearnerKind::a2c;
  if (name == "dedqn") return LearnerKind::dedqn;
  if (name == "dea2c") return LearnerKind::dea2c;
  if (name == "mmfq") return LearnerKind::mmfq;
  throw std::runtime_error("unknown learner '" + name +
                           "' (expected tabq, dqn, a2c, dedqn, dea2c or mmfq)");
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::tabq: return "tabq";
    case LearnerKind::dqn: return "dqn";
    case LearnerKind::a2c: return "a2c";
    case LearnerKind::dedqn: return "dedqn";
    case LearnerKind::dea2c: return "dea2c";
    case LearnerKind::mmfq: return "mmfq";
  }
  return "?";
}

std::unique_ptr<Learner> make_learner(LearnerKind kind, int zones,
                                      int num_agents, const HyperParams& hp,
                                      int density_head, uint64_t seed,
                                      long long budget) {
  auto need_head_on = [&](const char* who) {
    if (density_head == 0)
      throw std::runtime_error(std::string(who) +
                               " requires the density head; density_head=off "
                               "is not valid");
  };
  switch (kind) {
    case LearnerKind::tabq:
      if (density_head == 1)
        throw std::runtime_error("tabq has no density head");
      return std::make_unique<TabularQLearner>(zones, num_agents, hp, seed,
                                               budget);
    case LearnerKind::dqn: {
      DqnLearner::Options o;
      o.density_head = density_head == 1;
      return std::make_unique<DqnLearner>(zones, num_agents, hp, o, seed,
                                          budget);
    }
    case LearnerKind::dedqn: {
      need_head_on("dedqn");
      DqnLearner::Options o;
      o.entropy_bonus = true;
      o.density_train = true;
      o.density_head = true;
      return std::make_unique<DqnLearner>(zones, num_agents, hp, o, seed,
                                          budget);
    }
    case LearnerKind::mmfq: {
      if (density_head == 1)
        throw std::runtime_error("mmfq has no density head");
      DqnLearner::Options o;
      o.mean_field = true;
      return std::make_unique<DqnLearner>(zones, num_agents, hp, o, seed,
                                          budget);
    }
    case LearnerKind::a2c: {
      A2cLearner::Options o;
      o.density_head = density_head == 1;
      return std::make_unique<A2cLearner>(zones, num_agents, hp, o, seed,
                                          budget);
    }
    case LearnerKind::dea2c: {
      need_head_on("dea2c");
      A2cLearner::Options o;
      o.entropy_bonus = true;
      o.density_train = true;
      o.density_head = true;
      return std::make_unique<A2cLearner>(zones, num_agents, hp, o, seed,
                                          budget);
    }
  }
  throw std::runtime_error("unknown learner kind");
}

}  // namespace learners
