#pragma once
// Common learner interface plus the hyperparameter bundle shared by all
// learner families. One learner instance per agent unless a shared brain is
// requested by the harness.

#include <cstdint>
#include <vector>

#include "matchenv/world.hpp"

namespace learners {

struct HyperParams {
  double gamma = 0.99;
  double lr = 1e-4;         // Adam, Q family
  double lr_policy = 1e-5;  // RMSprop, actor
  double lr_value = 1e-4;   // RMSprop, critic
  double beta = 0.01;       // entropy bonus weight
  double lambda = 0.01;     // density loss weight
  double epsilon_start = 1.0;
  double epsilon_floor = 0.05;
  int replay_capacity = 50000;
  int replay_min_fill = 1000;
  int batch_size = 32;
  int target_sync = 1000;   // gradient steps between target refreshes
  int k_step = 5;           // actor-critic rollout length
  double alpha = 0.1;       // tabular learning rate
  bool alpha_anneal = false;  // tabular: per-pair 1/n(s,a) step sizes
  std::vector<int> hidden = {256, 256};
  double dropout = 0.5;
  int train_period = 1;     // experiences between gradient updates
  int density_buckets = 5;  // tabular occupancy discretization

  void validate() const;  // throws std::runtime_error naming the field
};

// Exponential decay from `start` that reaches `floor` at half of `budget`
// and stays clamped there for the rest of the run.
double epsilon_at(long long step, long long budget, double start, double floor);

class Learner {
public:
  virtual ~Learner() = default;

  virtual int act(const matchenv::Observation& obs, long long step) = 0;
  virtual void observe(const matchenv::Experience& e) = 0;
  virtual void on_period_end() {}
  virtual void set_training(bool on) { training_ = on; }
  bool training() const { return training_; }

  // Mean action frequencies per zone from the previous iteration; only the
  // mean-field learner consumes this.
  virtual void set_mean_actions(const std::vector<std::vector<double>>&) {}

  // True when a next-step occupancy estimate is being trained.
  virtual bool density_active() const { return false; }
  virtual std::vector<double> predict_density(int /*zone*/, int /*count*/,
                                              int /*action*/) {
    return {};
  }

protected:
  bool training_ = true;
};

}  // namespace learners
