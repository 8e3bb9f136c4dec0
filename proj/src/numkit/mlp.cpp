#include "numkit/mlp.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace numkit {

namespace {

// Dense affine map out = W x + b with a fixed summation order.
void affine(const std::vector<double>& w, const std::vector<double>& b,
            std::span<const double> x, std::vector<double>& out) {
  const int n_out = static_cast<int>(b.size());
  const int n_in = static_cast<int>(x.size());
  out.resize(n_out);
  for (int i = 0; i < n_out; ++i) {
    const double* row = w.data() + static_cast<size_t>(i) * n_in;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    int j = 0;
    for (; j + 4 <= n_in; j += 4) {
      s0 += row[j] * x[j];
      s1 += row[j + 1] * x[j + 1];
      s2 += row[j + 2] * x[j + 2];
      s3 += row[j + 3] * x[j + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; j < n_in; ++j) s += row[j] * x[j];
    out[i] = s + b[i];
  }
}

void run_forward(const Mlp& net, std::span<const double> x, bool train,
                 uint64_t dropout_seed, MlpWorkspace& ws) {
  const int L = net.num_layers();
  if (static_cast<int>(x.size()) != net.input_size())
    throw std::runtime_error("mlp forward: input size mismatch");
  ws.act.resize(L + 1);
  ws.pre.resize(L);
  ws.keep.resize(L);
  ws.act[0].assign(x.begin(), x.end());
  Rng drop_rng(dropout_seed);
  const bool dropping = train && net.dropout > 0.0;
  const double keep_scale = dropping ? 1.0 / (1.0 - net.dropout) : 1.0;
  for (int l = 0; l < L; ++l) {
    affine(net.weights[l], net.biases[l], ws.act[l], ws.pre[l]);
    if (l == L - 1) {
      ws.act[l + 1] = ws.pre[l];
      ws.keep[l].clear();
      continue;
    }
    const int n = static_cast<int>(ws.pre[l].size());
    ws.act[l + 1].resize(n);
    ws.keep[l].resize(n);
    for (int i = 0; i < n; ++i) {
      double h = ws.pre[l][i] > 0.0 ? ws.pre[l][i] : 0.0;
      double k = 1.0;
      if (dropping) k = drop_rng.uniform() < net.dropout ? 0.0 : keep_scale;
      ws.keep[l][i] = k;
      ws.act[l + 1][i] = h * k;
    }
  }
}

}  // namespace

bool Mlp::has_head(const std::string& name) const {
  for (const Head& h : heads)
    if (h.name == name) return true;
  return false;
}

const Head& Mlp::head(const std::string& name) const {
  for (const Head& h : heads)
    if (h.name == name) return h;
  throw std::runtime_error("mlp: no head named '" + name + "'");
}

Mlp mlp_init(const std::vector<int>& layer_sizes,
             const std::vector<std::pair<std::string, int>>& head_spec,
             double dropout, Rng& rng) {
  if (layer_sizes.size() < 2)
    throw std::runtime_error("mlp_init: need at least input and output layers");
  for (int s : layer_sizes)
    if (s <= 0) throw std::runtime_error("mlp_init: layer sizes must be positive");
  if (dropout < 0.0 || dropout >= 1.0)
    throw std::runtime_error("mlp_init: dropout must be in [0, 1)");
  Mlp net;
  net.layer_sizes = layer_sizes;
  net.dropout = dropout;
  int offset = 0;
  for (const auto& [name, size] : head_spec) {
    if (size <= 0) throw std::runtime_error("mlp_init: head size must be positive");
    net.heads.push_back({name, offset, size});
    offset += size;
  }
  if (!head_spec.empty() && offset != layer_sizes.back())
    throw std::runtime_error("mlp_init: heads must partition the output layer");
  const int L = net.num_layers();
  net.weights.resize(L);
  net.biases.resize(L);
  for (int l = 0; l < L; ++l) {
    int n_in = layer_sizes[l];
    int n_out = layer_sizes[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(n_in));
    net.weights[l].resize(static_cast<size_t>(n_out) * n_in);
    for (double& w : net.weights[l]) w = rng.normal() * scale;
    net.biases[l].assign(n_out, 0.0);
  }
  return net;
}

Gradients make_gradients(const Mlp& net) {
  Gradients g;
  g.weights.resize(net.weights.size());
  g.biases.resize(net.biases.size());
  for (size_t l = 0; l < net.weights.size(); ++l) {
    g.weights[l].assign(net.weights[l].size(), 0.0);
    g.biases[l].assign(net.biases[l].size(), 0.0);
  }
  return g;
}

void zero_gradients(Gradients& g) {
  for (auto& v : g.weights) v.assign(v.size(), 0.0);
  for (auto& v : g.biases) v.assign(v.size(), 0.0);
}

std::vector<double> forward(const Mlp& net, std::span<const double> x) {
  std::vector<double> out;
  forward_into(net, x, out);
  return out;
}

void forward_into(const Mlp& net, std::span<const double> x,
                  std::vector<double>& out) {
  thread_local MlpWorkspace ws;
  run_forward(net, x, false, 0, ws);
  out = ws.act.back();
}

std::vector<double> forward_train(const Mlp& net, std::span<const double> x,
                                  uint64_t dropout_seed) {
  MlpWorkspace ws;
  run_forward(net, x, true, dropout_seed, ws);
  return ws.act.back();
}

void forward_workspace(const Mlp& net, std::span<const double> x, bool train,
                       uint64_t dropout_seed, MlpWorkspace& ws) {
  run_forward(net, x, train, dropout_seed, ws);
}

void backprop_workspace(const Mlp& net, std::span<const double> upstream,
                        Gradients& grads, MlpWorkspace& ws) {
  const int L = net.num_layers();
  if (static_cast<int>(upstream.size()) != net.output_size())
    throw std::runtime_error("mlp backward: upstream size mismatch");
  ws.delta.resize(L);
  ws.delta[L - 1].assign(upstream.begin(), upstream.end());
  for (int l = L - 1; l >= 0; --l) {
    const std::vector<double>& delta = ws.delta[l];
    const std::vector<double>& a_in = ws.act[l];
    const int n_out = net.layer_sizes[l + 1];
    const int n_in = net.layer_sizes[l];
    double* gw = grads.weights[l].data();
    double* gb = grads.biases[l].data();
    for (int i = 0; i < n_out; ++i) {
      const double d = delta[i];
      gb[i] += d;
      double* gw_row = gw + static_cast<size_t>(i) * n_in;
      const double* a = a_in.data();
      for (int j = 0; j < n_in; ++j) gw_row[j] += d * a[j];
    }
    if (l == 0) break;
    std::vector<double>& dprev = ws.delta[l - 1];
    dprev.assign(n_in, 0.0);
    const double* w = net.weights[l].data();
    for (int i = 0; i < n_out; ++i) {
      const double d = delta[i];
      const double* row = w + static_cast<size_t>(i) * n_in;
      for (int j = 0; j < n_in; ++j) dprev[j] += d * row[j];
    }
    // Through dropout and ReLU of the previous hidden layer.
    for (int j = 0; j < n_in; ++j) {
      double k = ws.keep[l - 1].empty() ? 1.0 : ws.keep[l - 1][j];
      dprev[j] *= (ws.pre[l - 1][j] > 0.0 ? 1.0 : 0.0) * k;
    }
  }
}

void backward_accumulate(const Mlp& net, std::span<const double> x,
                         std::span<const double> upstream, bool train,
                         uint64_t dropout_seed, Gradients& grads,
                         MlpWorkspace& ws) {
  forward_workspace(net, x, train, dropout_seed, ws);
  backprop_workspace(net, upstream, grads, ws);
}

Gradients backward(const Mlp& net, std::span<const double> x,
                   std::span<const double> upstream, bool train,
                   uint64_t dropout_seed) {
  Gradients g = make_gradients(net);
  MlpWorkspace ws;
  backward_accumulate(net, x, upstream, train, dropout_seed, g, ws);
  return g;
}

double grad_check(Mlp& net, std::span<const double> x, const LossFn& loss,
                  double step) {
  std::vector<double> out = forward(net, x);
  std::vector<double> dout(out.size());
  loss(out, &dout);
  Gradients analytic = make_gradients(net);
  MlpWorkspace ws;
  backward_accumulate(net, x, dout, false, 0, analytic, ws);

  double worst = 0.0;
  auto probe = [&](double& theta, double a) {
    const double saved = theta;
    theta = saved + step;
    double lp = loss(forward(net, x), nullptr);
    theta = saved - step;
    double lm = loss(forward(net, x), nullptr);
    theta = saved;
    double n = (lp - lm) / (2.0 * step);
    double err = std::fabs(a - n) / std::max(1e-8, std::fabs(a) + std::fabs(n));
    if (err > worst) worst = err;
  };
  for (int l = 0; l < net.num_layers(); ++l) {
    for (size_t i = 0; i < net.weights[l].size(); ++i)
      probe(net.weights[l][i], analytic.weights[l][i]);
    for (size_t i = 0; i < net.biases[l].size(); ++i)
      probe(net.biases[l][i], analytic.biases[l][i]);
  }
  return worst;
}

long long param_count(const Mlp& net) {
  long long n = 0;
  for (const auto& w : net.weights) n += static_cast<long long>(w.size());
  for (const auto& b : net.biases) n += static_cast<long long>(b.size());
  return n;
}

}  // namespace numkit
