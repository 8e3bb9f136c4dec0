#include "learners/tabular.hpp"

#include <cmath>

namespace learners {

TabularQLearner::TabularQLearner(int zones, int num_agents,
                                 const HyperParams& hp, uint64_t seed,
                                 long long budget)
    : zones_(zones),
      num_agents_(num_agents),
      hp_(hp),
      budget_(budget),
      q_(static_cast<size_t>(zones) * hp.density_buckets * zones, 0.0),
      visits_(q_.size(), 0),
      rng_act_(numkit::mix_seed(seed, 1)) {
  hp_.validate();
}

int TabularQLearner::bucket_of(int count) const {
  double norm = static_cast<double>(count) / num_agents_;
  int b = static_cast<int>(norm * hp_.density_buckets);
  return b >= hp_.density_buckets ? hp_.density_buckets - 1 : b;
}

double TabularQLearner::epsilon(long long step) const {
  return epsilon_at(step, budget_, hp_.epsilon_start, hp_.epsilon_floor);
}

double TabularQLearner::max_q(int zone, int bucket) const {
  double best = q_[index(zone, bucket, 0)];
  for (int a = 1; a < zones_; ++a)
    best = std::max(best, q_[index(zone, bucket, a)]);
  return best;
}

int TabularQLearner::act(const matchenv::Observation& obs, long long step) {
  if (rng_act_.uniform() < epsilon(step)) return rng_act_.uniform_int(zones_);
  int bucket = bucket_of(obs.count);
  int best = 0;
  for (int a = 1; a < zones_; ++a)
    if (q_[index(obs.zone, bucket, a)] > q_[index(obs.zone, bucket, best)])
      best = a;
  return best;
}

void TabularQLearner::observe(const matchenv::Experience& e) {
  if (!training_) return;
  size_t idx = index(e.zone, bucket_of(e.count), e.action);
  double y =
      e.reward + hp_.gamma * max_q(e.next_zone, bucket_of(e.next_count));
  visits_[idx] += 1;
  double alpha = hp_.alpha_anneal
                     ? 1.0 / static_cast<double>(visits_[idx])
                     : hp_.alpha;
  q_[idx] += alpha * (y - q_[idx]);
}

}  // namespace learners
