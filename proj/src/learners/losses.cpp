#include "learners/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "numkit/mathfn.hpp"

using numkit::Gradients;
using numkit::Head;
using numkit::Mlp;
using numkit::MlpWorkspace;

namespace learners {

namespace {

thread_local MlpWorkspace tl_ws;
thread_local std::vector<double> tl_up;
thread_local std::vector<double> tl_p;

// The density head holds one softmax block per action, so its size is
// zones * zones.
int density_zones(const Head& dh) {
  int z = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dh.size))));
  if (z * z != dh.size)
    throw std::runtime_error("density head size must be a square");
  return z;
}

// Adds the density-term upstream for one sample into `up` and returns the
// sample's squared error at the observed coordinate.
double density_part(const Mlp& net, const QSample& s, double weight,
                    std::span<const double> out, std::vector<double>& up) {
  const Head& dh = net.head("density");
  const int zones = density_zones(dh);
  const int base = dh.offset + s.action * zones;
  std::span<const double> block(out.data() + base, zones);
  tl_p.resize(zones);
  numkit::softmax_into(block, tl_p);
  const double diff = tl_p[s.next_zone] - s.density_target;
  const double coef = weight * 2.0 * diff * tl_p[s.next_zone];
  for (int j = 0; j < zones; ++j)
    up[base + j] += coef * ((j == s.next_zone ? 1.0 : 0.0) - tl_p[j]);
  return diff * diff;
}

}  // namespace

double q_density_loss(const Mlp& net, std::span<const QSample> batch,
                      double lambda, bool use_density, Gradients* grads,
                      const DropoutPlan& plan) {
  if (batch.empty()) return 0.0;
  const Head& qh = net.head("q");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const bool density = use_density && lambda > 0.0;
  double q_loss = 0.0, d_loss = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const QSample& s = batch[i];
    uint64_t seed = plan.train ? numkit::mix_seed(plan.salt, i) : 0;
    numkit::forward_workspace(net, s.x, plan.train, seed, tl_ws);
    const std::vector<double>& out = tl_ws.act.back();
    tl_up.assign(out.size(), 0.0);
    const double diff = out[qh.offset + s.action] - s.target;
    q_loss += diff * diff;
    tl_up[qh.offset + s.action] = 2.0 * diff * inv_b;
    if (density) d_loss += density_part(net, s, lambda * inv_b, out, tl_up);
    if (grads) numkit::backprop_workspace(net, tl_up, *grads, tl_ws);
  }
  return (q_loss + (density ? lambda * d_loss : 0.0)) * inv_b;
}

double value_density_loss(const Mlp& net, std::span<const ValueSample> batch,
                          double lambda, std::span<const QSample> density_batch,
                          Gradients* grads, const DropoutPlan& plan) {
  const Head& vh = net.head("v");
  double v_loss = 0.0, d_loss = 0.0;
  const double inv_m =
      batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const ValueSample& s = batch[i];
    uint64_t seed = plan.train ? numkit::mix_seed(plan.salt, i) : 0;
    numkit::forward_workspace(net, s.x, plan.train, seed, tl_ws);
    const double diff = tl_ws.act.back()[vh.offset] - s.target;
    v_loss += diff * diff;
    if (grads) {
      tl_up.assign(tl_ws.act.back().size(), 0.0);
      tl_up[vh.offset] = 2.0 * diff * inv_m;
      numkit::backprop_workspace(net, tl_up, *grads, tl_ws);
    }
  }
  const bool density = lambda > 0.0 && !density_batch.empty();
  if (density) {
    const double inv_b = 1.0 / static_cast<double>(density_batch.size());
    for (size_t i = 0; i < density_batch.size(); ++i) {
      const QSample& s = density_batch[i];
      uint64_t seed =
          plan.train ? numkit::mix_seed(plan.salt ^ 0x5851f42d4c957f2dull, i) : 0;
      numkit::forward_workspace(net, s.x, plan.train, seed, tl_ws);
      tl_up.assign(tl_ws.act.back().size(), 0.0);
      d_loss +=
          density_part(net, s, lambda * inv_b, tl_ws.act.back(), tl_up);
      if (grads) numkit::backprop_workspace(net, tl_up, *grads, tl_ws);
    }
    d_loss *= inv_b;
  }
  return v_loss * inv_m + lambda * d_loss;
}

double policy_gradient_loss(const Mlp& net, std::span<const PolicySample> batch,
                            Gradients* grads, const DropoutPlan& plan) {
  if (batch.empty()) return 0.0;
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const PolicySample& s = batch[i];
    uint64_t seed = plan.train ? numkit::mix_seed(plan.salt, i) : 0;
    numkit::forward_workspace(net, s.x, plan.train, seed, tl_ws);
    const std::vector<double>& out = tl_ws.act.back();
    tl_p.resize(out.size());
    numkit::softmax_into(out, tl_p);
    double mx = out[0];
    for (double v : out) mx = std::max(mx, v);
    double lse = 0.0;
    for (double v : out) lse += std::exp(v - mx);
    const double logp = out[s.action] - mx - std::log(lse);
    loss += -logp * s.advantage;
    if (grads) {
      tl_up.resize(out.size());
      for (size_t j = 0; j < out.size(); ++j)
        tl_up[j] = s.advantage * inv_m *
                   (tl_p[j] - (static_cast<int>(j) == s.action ? 1.0 : 0.0));
      numkit::backprop_workspace(net, tl_up, *grads, tl_ws);
    }
  }
  return loss * inv_m;
}

double q_at(const Mlp& net, std::span<const double> x, int action) {
  thread_local std::vector<double> out;
  numkit::forward_into(net, x, out);
  return out[net.head("q").offset + action];
}

double max_q(const Mlp& net, std::span<const double> x) {
  thread_local std::vector<double> out;
  numkit::forward_into(net, x, out);
  const Head& qh = net.head("q");
  double best = out[qh.offset];
  for (int a = 1; a < qh.size; ++a)
    best = std::max(best, out[qh.offset + a]);
  return best;
}

int argmax_q(const Mlp& net, std::span<const double> x) {
  thread_local std::vector<double> out;
  numkit::forward_into(net, x, out);
  const Head& qh = net.head("q");
  int best = 0;
  for (int a = 1; a < qh.size; ++a)
    if (out[qh.offset + a] > out[qh.offset + best]) best = a;
  return best;
}

double state_value(const Mlp& net, std::span<const double> x) {
  thread_local std::vector<double> out;
  numkit::forward_into(net, x, out);
  return out[net.head("v").offset];
}

std::vector<double> predicted_density(const Mlp& net, std::span<const double> x,
                                      int action) {
  thread_local std::vector<double> out;
  numkit::forward_into(net, x, out);
  const Head& dh = net.head("density");
  const int zones = density_zones(dh);
  std::span<const double> block(out.data() + dh.offset + action * zones, zones);
  return numkit::softmax(block);
}

double density_entropy(const Mlp& net, std::span<const double> x, int action) {
  std::vector<double> p = predicted_density(net, x, action);
  return numkit::entropy(p);
}

}  // namespace learners
