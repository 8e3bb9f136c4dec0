#include "numkit/optimizer.hpp"

#include <cmath>

namespace numkit {

namespace {

void check_finite(const Gradients& g) {
  for (const auto& v : g.weights)
    for (double x : v)
      if (!std::isfinite(x)) throw NumericError("optimizer: non-finite gradient");
  for (const auto& v : g.biases)
    for (double x : v)
      if (!std::isfinite(x)) throw NumericError("optimizer: non-finite gradient");
}

}  // namespace

OptimizerState make_optimizer(OptimizerKind kind, double lr, const Mlp& net) {
  OptimizerState s;
  s.kind = kind;
  s.lr = lr;
  auto zeros_like = [](const std::vector<std::vector<double>>& src) {
    std::vector<std::vector<double>> out(src.size());
    for (size_t i = 0; i < src.size(); ++i) out[i].assign(src[i].size(), 0.0);
    return out;
  };
  if (kind == OptimizerKind::adam) {
    s.m_w = zeros_like(net.weights);
    s.m_b = zeros_like(net.biases);
  }
  if (kind != OptimizerKind::sgd) {
    s.v_w = zeros_like(net.weights);
    s.v_b = zeros_like(net.biases);
  }
  return s;
}

void optimizer_step(Mlp& net, const Gradients& grads, OptimizerState& opt) {
  check_finite(grads);
  opt.t += 1;
  bool ok = true;
  auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                    std::vector<double>* m, std::vector<double>* v) {
    const size_t n = theta.size();
    switch (opt.kind) {
      case OptimizerKind::sgd:
        for (size_t i = 0; i < n; ++i) theta[i] -= opt.lr * g[i];
        break;
      case OptimizerKind::adam: {
        const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
        const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
        for (size_t i = 0; i < n; ++i) {
          (*m)[i] = opt.beta1 * (*m)[i] + (1.0 - opt.beta1) * g[i];
          (*v)[i] = opt.beta2 * (*v)[i] + (1.0 - opt.beta2) * g[i] * g[i];
          double mhat = (*m)[i] / c1;
          double vhat = (*v)[i] / c2;
          theta[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
        }
        break;
      }
      case OptimizerKind::rmsprop:
        for (size_t i = 0; i < n; ++i) {
          (*v)[i] = opt.decay * (*v)[i] + (1.0 - opt.decay) * g[i] * g[i];
          theta[i] -= opt.lr * g[i] / (std::sqrt((*v)[i]) + opt.eps);
        }
        break;
    }
    for (size_t i = 0; i < n; ++i) ok = ok && std::isfinite(theta[i]);
  };
  for (size_t l = 0; l < net.weights.size(); ++l) {
    update(net.weights[l], grads.weights[l],
           opt.m_w.empty() ? nullptr : &opt.m_w[l],
           opt.v_w.empty() ? nullptr : &opt.v_w[l]);
    update(net.biases[l], grads.biases[l],
           opt.m_b.empty() ? nullptr : &opt.m_b[l],
           opt.v_b.empty() ? nullptr : &opt.v_b[l]);
  }
  if (!ok) throw NumericError("optimizer: parameter became non-finite");
}

}  // namespace numkit
