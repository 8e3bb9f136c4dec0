#pragma once
// Advantage actor-critic with k-step returns. Separate policy and value
// networks; the value network optionally carries the occupancy prediction
// head and its entropy feeds the return target as a bonus.

#include <cstdint>
#include <map>
#include <vector>

#include "learners/learner.hpp"
#include "learners/losses.hpp"
#include "learners/replay.hpp"
#include "numkit/mlp.hpp"
#include "numkit/optimizer.hpp"

namespace learners {

class A2cLearner : public Learner {
public:
  struct Options {
    bool entropy_bonus = false;
    bool density_train = false;
    bool density_head = false;
  };

  A2cLearner(int zones, int num_agents, const HyperParams& hp, Options opt,
             uint64_t seed, long long budget);

  int act(const matchenv::Observation& obs, long long step) override;
  void observe(const matchenv::Experience& e) override;
  void on_period_end() override;
  bool density_active() const override {
    return opt_.density_train && hp_.lambda > 0.0;
  }
  std::vector<double> predict_density(int zone, int count, int action) override;

  numkit::Mlp& policy_net() { return policy_; }
  numkit::Mlp& value_net() { return value_; }
  std::vector<double> policy(const matchenv::Observation& obs);
  void encode(int zone, int count, std::vector<double>& out) const;
  long long updates() const { return updates_; }

private:
  void flush(std::vector<matchenv::Experience>& buf);

  int zones_;
  int num_agents_;
  HyperParams hp_;
  Options opt_;
  numkit::Mlp policy_;
  numkit::Mlp value_;
  numkit::OptimizerState policy_opt_;
  numkit::OptimizerState value_opt_;
  numkit::Gradients policy_grads_;
  numkit::Gradients value_grads_;
  ReplayMemory replay_;
  numkit::Rng rng_act_;
  numkit::Rng rng_replay_;
  uint64_t policy_salt_;
  uint64_t value_salt_;
  std::map<int, std::vector<matchenv::Experience>> rollouts_;
  long long updates_ = 0;
  std::vector<double> x_;
};

}  // namespace learners
