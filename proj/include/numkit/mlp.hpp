#pragma once
// Fully connected network with ReLU hidden layers, a linear output layer
// split into named heads, and inverted dropout on hidden units.
// Double precision throughout; all stochastic behaviour is seeded.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "numkit/rng.hpp"

namespace numkit {

struct Head {
  std::string name;
  int offset = 0;
  int size = 0;
};

struct Mlp {
  std::vector<int> layer_sizes;              // input, hidden..., output
  std::vector<std::vector<double>> weights;  // per layer, row-major (out x in)
  std::vector<std::vector<double>> biases;   // per layer
  std::vector<Head> heads;                   // partition of the output vector
  double dropout = 0.0;                      // hidden-unit drop probability

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  bool has_head(const std::string& name) const;
  const Head& head(const std::string& name) const;  // throws if absent
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Reusable buffers for forward/backward passes.
struct MlpWorkspace {
  std::vector<std::vector<double>> act;   // act[0] = input, act[L] = output
  std::vector<std::vector<double>> pre;   // preactivations per layer
  std::vector<std::vector<double>> keep;  // dropout multipliers per hidden layer
  std::vector<std::vector<double>> delta;
};

// Weights ~ N(0, 1/sqrt(fan_in)), biases zero. `head_spec` lists (name, size)
// pairs that must partition the output layer in order.
Mlp mlp_init(const std::vector<int>& layer_sizes,
             const std::vector<std::pair<std::string, int>>& head_spec,
             double dropout, Rng& rng);

Gradients make_gradients(const Mlp& net);
void zero_gradients(Gradients& g);

// Evaluation-mode forward pass (no dropout).
std::vector<double> forward(const Mlp& net, std::span<const double> x);
void forward_into(const Mlp& net, std::span<const double> x,
                  std::vector<double>& out);

// Training-mode forward pass; the dropout masks are a pure function of
// `dropout_seed`, drawn unit by unit in a fixed order.
std::vector<double> forward_train(const Mlp& net, std::span<const double> x,
                                  uint64_t dropout_seed);

// Forward pass that keeps activations, preactivations and dropout masks in
// the workspace; the output lands in ws.act.back().
void forward_workspace(const Mlp& net, std::span<const double> x, bool train,
                       uint64_t dropout_seed, MlpWorkspace& ws);

// Backpropagates `upstream` = dL/d(output) through a workspace filled by
// forward_workspace, accumulating parameter gradients into `grads`.
void backprop_workspace(const Mlp& net, std::span<const double> upstream,
                        Gradients& grads, MlpWorkspace& ws);

// Recomputes the forward pass (training mode iff `train`, reproducing masks
// from `dropout_seed`), then backpropagates `upstream` = dL/d(output).
// Gradients are accumulated into `grads`.
void backward_accumulate(const Mlp& net, std::span<const double> x,
                         std::span<const double> upstream, bool train,
                         uint64_t dropout_seed, Gradients& grads,
                         MlpWorkspace& ws);

// Convenience wrapper that allocates its own workspace and returns fresh
// gradients.
Gradients backward(const Mlp& net, std::span<const double> x,
                   std::span<const double> upstream, bool train = false,
                   uint64_t dropout_seed = 0);

// Scalar loss of the network output; fills *dout with dL/d(output) when
// dout is non-null.
using LossFn =
    std::function<double(std::span<const double> out, std::vector<double>* dout)>;

// Compares the analytic parameter gradient of `loss` against central finite
// differences. Returns the maximum relative error
// |a - n| / max(1e-8, |a| + |n|) over all parameters. Evaluation mode.
double grad_check(Mlp& net, std::span<const double> x, const LossFn& loss,
                  double step = 1e-5);

long long param_count(const Mlp& net);

}  // namespace numkit
