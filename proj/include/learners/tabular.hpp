#pragma once
// Table-based Q-learning over (zone, occupancy bucket) states.

#include <cstdint>
#include <vector>

#include "learners/learner.hpp"
#include "numkit/rng.hpp"

namespace learners {

class TabularQLearner : public Learner {
public:
  TabularQLearner(int zones, int num_agents, const HyperParams& hp,
                  uint64_t seed, long long budget);

  int act(const matchenv::Observation& obs, long long step) override;
  void observe(const matchenv::Experience& e) override;

  int bucket_of(int count) const;
  double q(int zone, int bucket, int action) const {
    return q_[index(zone, bucket, action)];
  }
  double& q_ref(int zone, int bucket, int action) {
    return q_[index(zone, bucket, action)];
  }
  double epsilon(long long step) const;
  double max_q(int zone, int bucket) const;

private:
  size_t index(int zone, int bucket, int action) const {
    return (static_cast<size_t>(zone) * hp_.density_buckets + bucket) * zones_ +
           action;
  }

  int zones_;
  int num_agents_;
  HyperParams hp_;
  long long budget_;
  std::vector<double> q_;
  std::vector<long long> visits_;
  numkit::Rng rng_act_;
};

}  // namespace learners
