#pragma once
// Loss kernels shared by the network learners and the gradient verification
// suite. Each function returns the scalar loss and, when `grads` is given,
// accumulates dLoss/dParameters through the exact same code path the
// training updates use.

#include <cstdint>
#include <span>
#include <vector>

#include "numkit/mlp.hpp"

namespace learners {

// Per-sample dropout control for a batch pass. With train=false the pass is
// deterministic; with train=true sample i uses seed mix_seed(salt, i).
struct DropoutPlan {
  bool train = false;
  uint64_t salt = 0;
};

struct QSample {
  std::vector<double> x;       // encoded observation
  int action = 0;
  double target = 0.0;         // fixed regression target for Q(x, action)
  int next_zone = 0;           // observed coordinate for the density loss
  double density_target = 0.0; // realized next occupancy at next_zone
};

struct ValueSample {
  std::vector<double> x;
  double target = 0.0;  // return plus any entropy bonus, held constant
};

struct PolicySample {
  std::vector<double> x;
  int action = 0;
  double advantage = 0.0;  // held constant
};

// Mean squared TD error on the "q" head; when lambda > 0 and use_density,
// adds lambda times the mean squared error of the predicted next-zone
// occupancy at the observed coordinate, through the per-action softmax
// block of the "density" head.
double q_density_loss(const numkit::Mlp& net, std::span<const QSample> batch,
                      double lambda, bool use_density, numkit::Gradients* grads,
                      const DropoutPlan& plan = {});

// Mean squared error on the "v" head over `batch`, plus lambda times the
// density term over `density_batch` (same form as above).
double value_density_loss(const numkit::Mlp& net,
                          std::span<const ValueSample> batch, double lambda,
                          std::span<const QSample> density_batch,
                          numkit::Gradients* grads,
                          const DropoutPlan& plan = {});

// Mean of -log pi(action | x) * advantage over the batch; logits are the
// whole output layer.
double policy_gradient_loss(const numkit::Mlp& net,
                            std::span<const PolicySample> batch,
                            numkit::Gradients* grads,
                            const DropoutPlan& plan = {});

// Helpers over a net's heads, evaluation mode.
double q_at(const numkit::Mlp& net, std::span<const double> x, int action);
double max_q(const numkit::Mlp& net, std::span<const double> x);
int argmax_q(const numkit::Mlp& net, std::span<const double> x);  // lowest index wins ties
double state_value(const numkit::Mlp& net, std::span<const double> x);
// Softmax of the density block for `action`.
std::vector<double> predicted_density(const numkit::Mlp& net,
                                      std::span<const double> x, int action);
double density_entropy(const numkit::Mlp& net, std::span<const double> x,
                       int action);

}  // namespace learners
