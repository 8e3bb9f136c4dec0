#pragma once
// Q-learning over the network kernel. One class covers the plain variant,
// the entropy/density variant, and the mean-field variant, switched by
// options so that shared machinery stays identical across comparisons.

#include <cstdint>
#include <vector>

#include "learners/learner.hpp"
#include "learners/losses.hpp"
#include "learners/replay.hpp"
#include "numkit/mlp.hpp"
#include "numkit/optimizer.hpp"

namespace learners {

class DqnLearner : public Learner {
public:
  struct Options {
    bool entropy_bonus = false;  // target adds beta * entropy of predicted occupancy
    bool density_train = false;  // density head trained with weight lambda
    bool density_head = false;   // head present in the architecture
    bool mean_field = false;     // input carries the zone's mean action row
  };

  DqnLearner(int zones, int num_agents, const HyperParams& hp, Options opt,
             uint64_t seed, long long budget);

  int act(const matchenv::Observation& obs, long long step) override;
  void observe(const matchenv::Experience& e) override;
  void set_mean_actions(const std::vector<std::vector<double>>& table) override;
  bool density_active() const override {
    return opt_.density_train && hp_.lambda > 0.0;
  }
  std::vector<double> predict_density(int zone, int count, int action) override;

  // Regression target for one stored transition, from the target network.
  double target_for(const matchenv::Experience& e);

  numkit::Mlp& online_net() { return online_; }
  numkit::Mlp& target_net() { return target_; }
  ReplayMemory& replay() { return replay_; }
  long long train_steps() const { return train_steps_; }
  double epsilon(long long step) const;
  void encode(int zone, int count, std::vector<double>& out) const;

private:
  void train_batch();

  int zones_;
  int num_agents_;
  HyperParams hp_;
  Options opt_;
  long long budget_;
  numkit::Mlp online_;
  numkit::Mlp target_;
  numkit::OptimizerState opt_state_;
  numkit::Gradients grads_;
  ReplayMemory replay_;
  numkit::Rng rng_act_;
  numkit::Rng rng_replay_;
  uint64_t dropout_salt_;
  std::vector<std::vector<double>> mean_actions_;
  long long observed_ = 0;
  long long train_steps_ = 0;
  std::vector<QSample> batch_;
  std::vector<double> x_;
};

}  // namespace learners
