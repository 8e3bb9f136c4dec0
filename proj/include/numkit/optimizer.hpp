#pragma once
// SGD, Adam and RMSprop updates over Mlp parameters. Updates refuse
// non-finite gradients and verify the parameters stay finite.

#include <stdexcept>
#include <string>
#include <vector>

#include "numkit/mlp.hpp"

namespace numkit {

class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

enum class OptimizerKind { sgd, adam, rmsprop };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::sgd;
  double lr = 1e-3;
  double beta1 = 0.9;     // adam
  double beta2 = 0.999;   // adam
  double decay = 0.99;    // rmsprop
  double eps = 1e-8;
  long long t = 0;        // completed steps (adam bias correction)
  std::vector<std::vector<double>> m_w, m_b;  // first moments
  std::vector<std::vector<double>> v_w, v_b;  // second moments
};

OptimizerState make_optimizer(OptimizerKind kind, double lr, const Mlp& net);

// Applies one update of `grads` to `net`. Throws NumericError if any
// gradient is non-finite, or if a parameter becomes non-finite.
void optimizer_step(Mlp& net, const Gradients& grads, OptimizerState& opt);

}  // namespace numkit
