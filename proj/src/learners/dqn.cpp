#include "learners/dqn.hpp"

#include <cmath>
#include <stdexcept>

#include "learners/features.hpp"
#include "numkit/mathfn.hpp"

namespace learners {

namespace {

numkit::Mlp build_net(int zones, bool mean_field, bool density_head,
                      const HyperParams& hp, numkit::Rng& rng) {
  std::vector<int> sizes;
  sizes.push_back(mean_field ? mmf_feature_size(zones)
                             : obs_feature_size(zones));
  for (int h : hp.hidden) sizes.push_back(h);
  std::vector<std::pair<std::string, int>> heads{{"q", zones}};
  int out = zones;
  if (density_head) {
    heads.emplace_back("density", zones * zones);
    out += zones * zones;
  }
  sizes.push_back(out);
  return numkit::mlp_init(sizes, heads, hp.dropout, rng);
}

}  // namespace

DqnLearner::DqnLearner(int zones, int num_agents, const HyperParams& hp,
                       Options opt, uint64_t seed, long long budget)
    : zones_(zones),
      num_agents_(num_agents),
      hp_(hp),
      opt_(opt),
      budget_(budget),
      online_([&] {
        numkit::Rng init(numkit::mix_seed(seed, 0));
        return build_net(zones, opt.mean_field, opt.density_head, hp, init);
      }()),
      target_(online_),
      opt_state_(numkit::make_optimizer(numkit::OptimizerKind::adam, hp.lr,
                                        online_)),
      grads_(numkit::make_gradients(online_)),
      replay_(hp.replay_capacity),
      rng_act_(numkit::mix_seed(seed, 1)),
      rng_replay_(numkit::mix_seed(seed, 2)),
      dropout_salt_(numkit::mix_seed(seed, 3)),
      mean_actions_(zones, std::vector<double>(zones, 1.0 / zones)) {
  hp_.validate();
  if ((opt_.entropy_bonus || opt_.density_train) && !opt_.density_head)
    throw std::runtime_error("dqn: entropy/density options need the density head");
}

double DqnLearner::epsilon(long long step) const {
  return epsilon_at(step, budget_, hp_.epsilon_start, hp_.epsilon_floor);
}

void DqnLearner::encode(int zone, int count, std::vector<double>& out) const {
  double norm = static_cast<double>(count) / num_agents_;
  if (opt_.mean_field)
    encode_mmf(zone, norm, mean_actions_[zone], zones_, out);
  else
    encode_obs(zone, norm, zones_, out);
}

int DqnLearner::act(const matchenv::Observation& obs, long long step) {
  if (rng_act_.uniform() < epsilon(step)) return rng_act_.uniform_int(zones_);
  encode(obs.zone, obs.count, x_);
  return argmax_q(online_, x_);
}

void DqnLearner::set_mean_actions(
    const std::vector<std::vector<double>>& table) {
  if (static_cast<int>(table.size()) != zones_)
    throw std::runtime_error("dqn: mean action table must have one row per zone");
  mean_actions_ = table;
}

std::vector<double> DqnLearner::predict_density(int zone, int count,
                                                int action) {
  if (!opt_.density_head) return {};
  encode(zone, count, x_);
  return predicted_density(online_, x_, action);
}

double DqnLearner::target_for(const matchenv::Experience& e) {
  encode(e.next_zone, e.next_count, x_);
  double y = e.reward + hp_.gamma * max_q(target_, x_);
  if (opt_.entropy_bonus && hp_.beta > 0.0) {
    encode(e.zone, e.count, x_);
    y += hp_.beta * density_entropy(target_, x_, e.action);
  }
  return y;
}

void DqnLearner::observe(const matchenv::Experience& e) {
  if (!training_) return;
  replay_.push(e);
  observed_ += 1;
  if (observed_ % hp_.train_period == 0) train_batch();
}

void DqnLearner::train_batch() {
  if (replay_.size() < hp_.replay_min_fill) return;
  batch_.resize(hp_.batch_size);
  for (int i = 0; i < hp_.batch_size; ++i) {
    const matchenv::Experience& e = replay_.sample(rng_replay_);
    QSample& s = batch_[i];
    encode(e.zone, e.count, s.x);
    s.action = e.action;
    s.target = target_for(e);
    s.next_zone = e.next_zone;
    s.density_target = e.next_normalized;
  }
  numkit::zero_gradients(grads_);
  DropoutPlan plan{hp_.dropout > 0.0,
                  numkit::mix_seed(dropout_salt_, train_steps_)};
  double loss = q_density_loss(online_, batch_, hp_.lambda, opt_.density_train,
                               &grads_, plan);
  if (!std::isfinite(loss))
    throw numkit::NumericError("dqn: non-finite training loss");
  numkit::optimizer_step(online_, grads_, opt_state_);
  train_steps_ += 1;
  if (train_steps_ % hp_.target_sync == 0) target_ = online_;
}

}  // namespace learners
