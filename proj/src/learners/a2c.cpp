#include "learners/a2c.hpp"

#include <cmath>
#include <stdexcept>

#include "learners/features.hpp"
#include "numkit/mathfn.hpp"

namespace learners {

namespace {

numkit::Mlp build_policy(int zones, const HyperParams& hp, numkit::Rng& rng) {
  std::vector<int> sizes{obs_feature_size(zones)};
  for (int h : hp.hidden) sizes.push_back(h);
  sizes.push_back(zones);
  return numkit::mlp_init(sizes, {{"pi", zones}}, hp.dropout, rng);
}

numkit::Mlp build_value(int zones, bool density_head, const HyperParams& hp,
                        numkit::Rng& rng) {
  std::vector<int> sizes{obs_feature_size(zones)};
  for (int h : hp.hidden) sizes.push_back(h);
  std::vector<std::pair<std::string, int>> heads{{"v", 1}};
  int out = 1;
  if (density_head) {
    heads.emplace_back("density", zones * zones);
    out += zones * zones;
  }
  sizes.push_back(out);
  return numkit::mlp_init(sizes, heads, hp.dropout, rng);
}

}  // namespace

A2cLearner::A2cLearner(int zones, int num_agents, const HyperParams& hp,
                       Options opt, uint64_t seed, long long /*budget*/)
    : zones_(zones),
      num_agents_(num_agents),
      hp_(hp),
      opt_(opt),
      policy_([&] {
        numkit::Rng init(numkit::mix_seed(seed, 0));
        return build_policy(zones, hp, init);
      }()),
      value_([&] {
        numkit::Rng init(numkit::mix_seed(seed, 1));
        return build_value(zones, opt.density_head, hp, init);
      }()),
      policy_opt_(numkit::make_optimizer(numkit::OptimizerKind::rmsprop,
                                         hp.lr_policy, policy_)),
      value_opt_(numkit::make_optimizer(numkit::OptimizerKind::rmsprop,
                                        hp.lr_value, value_)),
      policy_grads_(numkit::make_gradients(policy_)),
      value_grads_(numkit::make_gradients(value_)),
      replay_(hp.replay_capacity),
      rng_act_(numkit::mix_seed(seed, 2)),
      rng_replay_(numkit::mix_seed(seed, 4)),
      policy_salt_(numkit::mix_seed(seed, 5)),
      value_salt_(numkit::mix_seed(seed, 6)) {
  hp_.validate();
  if ((opt_.entropy_bonus || opt_.density_train) && !opt_.density_head)
    throw std::runtime_error("a2c: entropy/density options need the density head");
}

void A2cLearner::encode(int zone, int count, std::vector<double>& out) const {
  encode_obs(zone, static_cast<double>(count) / num_agents_, zones_, out);
}

std::vector<double> A2cLearner::policy(const matchenv::Observation& obs) {
  encode(obs.zone, obs.count, x_);
  std::vector<double> logits = numkit::forward(policy_, x_);
  return numkit::softmax(logits);
}

int A2cLearner::act(const matchenv::Observation& obs, long long /*step*/) {
  std::vector<double> p = policy(obs);
  double u = rng_act_.uniform();
  double acc = 0.0;
  for (int a = 0; a < zones_; ++a) {
    acc += p[a];
    if (u < acc) return a;
  }
  return zones_ - 1;
}

std::vector<double> A2cLearner::predict_density(int zone, int count,
                                                int action) {
  if (!opt_.density_head) return {};
  encode(zone, count, x_);
  return predicted_density(value_, x_, action);
}

void A2cLearner::observe(const matchenv::Experience& e) {
  if (!training_) return;
  if (opt_.density_train) replay_.push(e);
  std::vector<matchenv::Experience>& buf = rollouts_[e.agent];
  buf.push_back(e);
  if (static_cast<int>(buf.size()) >= hp_.k_step) flush(buf);
}

void A2cLearner::on_period_end() {
  if (!training_) return;
  for (auto& [agent, buf] : rollouts_)
    if (!buf.empty()) flush(buf);
}

void A2cLearner::flush(std::vector<matchenv::Experience>& buf) {
  const int m = static_cast<int>(buf.size());
  const matchenv::Experience& last = buf.back();
  encode(last.next_zone, last.next_count, x_);
  double ret = state_value(value_, x_);
  std::vector<double> returns(m);
  for (int i = m - 1; i >= 0; --i) {
    ret = buf[i].reward + hp_.gamma * ret;
    returns[i] = ret;
  }
  std::vector<ValueSample> vsamples(m);
  std::vector<PolicySample> psamples(m);
  for (int i = 0; i < m; ++i) {
    const matchenv::Experience& e = buf[i];
    encode(e.zone, e.count, x_);
    double bonus = 0.0;
    if (opt_.entropy_bonus && hp_.beta > 0.0)
      bonus = hp_.beta * density_entropy(value_, x_, e.action);
    double target = returns[i] + bonus;
    vsamples[i] = ValueSample{x_, target};
    psamples[i] =
        PolicySample{x_, e.action, target - state_value(value_, x_)};
  }
  std::vector<QSample> dbatch;
  if (opt_.density_train && hp_.lambda > 0.0 &&
      replay_.size() >= hp_.replay_min_fill) {
    dbatch.resize(hp_.batch_size);
    for (int i = 0; i < hp_.batch_size; ++i) {
      const matchenv::Experience& e = replay_.sample(rng_replay_);
      QSample& s = dbatch[i];
      encode(e.zone, e.count, s.x);
      s.action = e.action;
      s.next_zone = e.next_zone;
      s.density_target = e.next_normalized;
    }
  }
  numkit::zero_gradients(value_grads_);
  DropoutPlan vplan{hp_.dropout > 0.0, numkit::mix_seed(value_salt_, updates_)};
  double vloss = value_density_loss(value_, vsamples, hp_.lambda, dbatch,
                                    &value_grads_, vplan);
  numkit::zero_gradients(policy_grads_);
  DropoutPlan pplan{hp_.dropout > 0.0,
                    numkit::mix_seed(policy_salt_, updates_)};
  double ploss =
      policy_gradient_loss(policy_, psamples, &policy_grads_, pplan);
  if (!std::isfinite(vloss) || !std::isfinite(ploss))
    throw numkit::NumericError("a2c: non-finite training loss");
  numkit::optimizer_step(value_, value_grads_, value_opt_);
  numkit::optimizer_step(policy_, policy_grads_, policy_opt_);
  updates_ += 1;
  buf.clear();
}

}  // namespace learners
