#include "cli/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "learners/a2c.hpp"
#include "learners/factory.hpp"
#include "learners/losses.hpp"
#include "learners/tabular.hpp"
#include "matchenv/world.hpp"
#include "numkit/mathfn.hpp"
#include "numkit/mlp.hpp"
#include "numkit/rng.hpp"

namespace verify {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// True when every rectifier input across the given inputs is safely away
// from its kink, so finite differences stay on one linear piece.
bool kink_free(const numkit::Mlp& net,
               const std::vector<std::vector<double>>& inputs, double margin) {
  numkit::MlpWorkspace ws;
  for (const auto& x : inputs) {
    numkit::forward_workspace(net, x, false, 0, ws);
    for (int l = 0; l < net.num_layers() - 1; ++l)
      for (double p : ws.pre[l])
        if (std::fabs(p) < margin) return false;
  }
  return true;
}

double fd_max_rel_err(numkit::Mlp& net, const std::function<double()>& loss,
                      const numkit::Gradients& analytic, double h) {
  double worst = 0.0;
  auto probe = [&](double& theta, double a) {
    const double saved = theta;
    auto at = [&](double offset) {
      theta = saved + offset;
      double v = loss();
      theta = saved;
      return v;
    };
    // Fourth-order central stencil keeps truncation error below the
    // roundoff of the loss itself for any reasonable h.
    double n =
        (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
    // Components far below the gradient's working scale carry only finite
    // difference noise, so they are held to an absolute bar instead.
    double err = std::fabs(a - n) / std::max(1e-6, std::fabs(a) + std::fabs(n));
    worst = std::max(worst, err);
  };
  for (int l = 0; l < net.num_layers(); ++l) {
    for (size_t i = 0; i < net.weights[l].size(); ++i)
      probe(net.weights[l][i], analytic.weights[l][i]);
    for (size_t i = 0; i < net.biases[l].size(); ++i)
      probe(net.biases[l][i], analytic.biases[l][i]);
  }
  return worst;
}

std::vector<double> random_input(int n, numkit::Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

}  // namespace

void CheckReport::check(bool pass, const std::string& line) {
  ok = ok && pass;
  lines.push_back(std::string(pass ? "  ok    " : "  FAIL  ") + line);
}

CheckReport gradcheck_suite(int trials, uint64_t seed) {
  CheckReport rep;
  numkit::Rng rng(numkit::mix_seed(seed, 0xac));
  const double tol = 1e-4;
  const double h = 1e-5;
  const int plain = trials / 4;
  const int per_loss = (trials - plain) / 4;

  // Raw backward pass against grad_check's own finite differences.
  double worst_plain = 0.0;
  for (int t = 0; t < plain; ++t) {
    for (;;) {
      int in = 2 + rng.uniform_int(5);
      int hid = 3 + rng.uniform_int(6);
      int out = 1 + rng.uniform_int(6);
      numkit::Mlp net = numkit::mlp_init({in, hid, out}, {}, 0.0, rng);
      std::vector<double> x = random_input(in, rng);
      if (!kink_free(net, {x}, 1e-4)) continue;
      std::vector<double> c(out), d(out);
      for (double& v : c) v = rng.normal();
      for (double& v : d) v = rng.normal();
      auto loss = [&](std::span<const double> o, std::vector<double>* dout) {
        double L = 0.0;
        for (int i = 0; i < out; ++i) {
          L += c[i] * o[i] + d[i] * o[i] * o[i];
          if (dout) (*dout)[i] = c[i] + 2.0 * d[i] * o[i];
        }
        return L;
      };
      worst_plain = std::max(worst_plain, numkit::grad_check(net, x, loss, h));
      break;
    }
  }
  rep.check(worst_plain < tol,
            fmt("backward vs finite differences: max rel err %.3g (tol 1e-4, "
                "%.0f trials)",
                worst_plain, static_cast<double>(plain)));

  auto loss_trials = [&](const char* name, auto make_trial) {
    double worst = 0.0;
    for (int t = 0; t < per_loss; ++t) worst = std::max(worst, make_trial());
    rep.check(worst < tol,
              fmt((std::string(name) +
                   ": max rel err %.3g (tol 1e-4, %.0f trials)")
                      .c_str(),
                  worst, static_cast<double>(per_loss)));
  };

  auto make_q_trial = [&](bool density) {
    for (;;) {
      const int zones = 2 + rng.uniform_int(2);
      const int in = zones + 1;
      const int hid = 4 + rng.uniform_int(5);
      std::vector<std::pair<std::string, int>> heads{{"q", zones}};
      int out = zones;
      if (density) {
        heads.emplace_back("density", zones * zones);
        out += zones * zones;
      }
      numkit::Mlp net = numkit::mlp_init({in, hid, out}, heads, 0.0, rng);
      const int b = 1 + rng.uniform_int(4);
      std::vector<learners::QSample> batch(b);
      std::vector<std::vector<double>> xs;
      for (auto& s : batch) {
        s.x = random_input(in, rng);
        s.action = rng.uniform_int(zones);
        s.target = rng.normal();
        s.next_zone = rng.uniform_int(zones);
        s.density_target = rng.uniform();
        xs.push_back(s.x);
      }
      if (!kink_free(net, xs, 1e-4)) continue;
      const double lambda = density ? 0.3 : 0.0;
      numkit::Gradients g = numkit::make_gradients(net);
      learners::q_density_loss(net, batch, lambda, density, &g);
      auto loss = [&] {
        return learners::q_density_loss(net, batch, lambda, density, nullptr);
      };
      return fd_max_rel_err(net, loss, g, h);
    }
  };
  loss_trials("q loss", [&] { return make_q_trial(false); });
  loss_trials("q plus density loss", [&] { return make_q_trial(true); });

  loss_trials("value plus density loss", [&]() -> double {
    for (;;) {
      const int zones = 2 + rng.uniform_int(2);
      const int in = zones + 1;
      const int hid = 4 + rng.uniform_int(5);
      numkit::Mlp net = numkit::mlp_init(
          {in, hid, 1 + zones * zones},
          {{"v", 1}, {"density", zones * zones}}, 0.0, rng);
      const int m = 1 + rng.uniform_int(3);
      const int b = 1 + rng.uniform_int(3);
      std::vector<learners::ValueSample> batch(m);
      std::vector<learners::QSample> dbatch(b);
      std::vector<std::vector<double>> xs;
      for (auto& s : batch) {
        s.x = random_input(in, rng);
        s.target = rng.normal();
        xs.push_back(s.x);
      }
      for (auto& s : dbatch) {
        s.x = random_input(in, rng);
        s.action = rng.uniform_int(zones);
        s.next_zone = rng.uniform_int(zones);
        s.density_target = rng.uniform();
        xs.push_back(s.x);
      }
      if (!kink_free(net, xs, 1e-4)) continue;
      numkit::Gradients g = numkit::make_gradients(net);
      learners::value_density_loss(net, batch, 0.3, dbatch, &g);
      auto loss = [&] {
        return learners::value_density_loss(net, batch, 0.3, dbatch, nullptr);
      };
      return fd_max_rel_err(net, loss, g, h);
    }
  });

  loss_trials("policy gradient loss", [&]() -> double {
    for (;;) {
      const int zones = 2 + rng.uniform_int(3);
      const int in = zones + 1;
      const int hid = 4 + rng.uniform_int(5);
      numkit::Mlp net =
          numkit::mlp_init({in, hid, zones}, {{"pi", zones}}, 0.0, rng);
      const int m = 1 + rng.uniform_int(4);
      std::vector<learners::PolicySample> batch(m);
      std::vector<std::vector<double>> xs;
      for (auto& s : batch) {
        s.x = random_input(in, rng);
        s.action = rng.uniform_int(zones);
        s.advantage = rng.normal();
        xs.push_back(s.x);
      }
      if (!kink_free(net, xs, 1e-4)) continue;
      numkit::Gradients g = numkit::make_gradients(net);
      learners::policy_gradient_loss(net, batch, &g);
      auto loss = [&] {
        return learners::policy_gradient_loss(net, batch, nullptr);
      };
      return fd_max_rel_err(net, loss, g, h);
    }
  });

  return rep;
}

CheckReport simulator_oracle(bool quick, uint64_t seed) {
  CheckReport rep;

  {  // Anonymous selection: 3 idle agents, 2 jobs, each picked 2/3 of the time.
    const int trials = quick ? 2000 : 10000;
    matchenv::EnvConfig cfg;
    cfg.grid_width = 2;
    cfg.grid_height = 1;
    cfg.num_agents = 3;
    cfg.zone_rates = {0.0, 0.0};
    cfg.ttl = 1;
    std::vector<long long> picked(3, 0);
    const std::vector<int> zones{0, 0, 0};
    for (int t = 0; t < trials; ++t) {
      matchenv::World w(cfg, numkit::mix_seed(seed, 7000 + t));
      w.place_agents(zones);
      w.add_job(0, 1);
      w.add_job(0, 1);
      matchenv::World::StepBegin sb = w.begin_step();
      for (int a = 0; a < 3; ++a)
        if (w.agents()[a].busy) picked[a] += 1;
      (void)sb;
    }
    double worst = 0.0, chi2 = 0.0;
    const double expect = 2.0 * trials / 3.0;
    for (int a = 0; a < 3; ++a) {
      double freq = static_cast<double>(picked[a]) / trials;
      worst = std::max(worst, std::fabs(freq - 2.0 / 3.0));
      chi2 += (picked[a] - expect) * (picked[a] - expect) / expect;
    }
    rep.check(worst <= 0.02,
              fmt("assignment anonymity: max |freq - 2/3| = %.4f (tol 0.02)",
                  worst));
    rep.check(chi2 < 9.21,
              fmt("assignment anonymity: chi-square %.2f (df 2, 1%% crit 9.21)",
                  chi2));
  }

  {  // Realized arrivals match the configured demand-to-agent ratio.
    const long long steps = quick ? 2000 : 10000;
    matchenv::EnvConfig cfg;
    cfg.grid_width = 5;
    cfg.grid_height = 2;
    cfg.num_agents = 50;
    cfg.dar = 0.4;
    matchenv::World w(cfg, numkit::mix_seed(seed, 11));
    numkit::Rng pol(numkit::mix_seed(seed, 12));
    for (long long t = 0; t < steps; ++t)
      matchenv::world_step(w, [&](int, const matchenv::Observation&) {
        return pol.uniform_int(w.num_zones());
      });
    double realized =
        static_cast<double>(w.jobs_spawned()) / (static_cast<double>(steps) * 50);
    double rel = std::fabs(realized - 0.4) / 0.4;
    rep.check(rel <= 0.025,
              fmt("realized demand rate: %.4f vs 0.4 (rel err %.3f, tol 0.025)",
                  realized, rel));

    matchenv::EnvConfig alt = cfg;
    alt.arrival = matchenv::ArrivalSchedule::alternate;
    alt.arrival_period = 50.0;
    matchenv::World w2(alt, numkit::mix_seed(seed, 13));
    for (long long t = 0; t < steps; ++t)
      matchenv::world_step(w2, [&](int, const matchenv::Observation&) {
        return pol.uniform_int(w2.num_zones());
      });
    double realized2 =
        static_cast<double>(w2.jobs_spawned()) / (static_cast<double>(steps) * 50);
    rep.check(std::fabs(realized2 - 0.4) / 0.4 <= 0.05,
              fmt("alternating schedule keeps mean rate: %.4f vs 0.4 (tol 5%%)",
                  realized2));
  }

  {  // Conservation fuzz: jobs are spawned, then assigned, expired or queued.
    const long long steps = quick ? 20000 : 100000;
    matchenv::EnvConfig cfg;
    cfg.grid_width = 3;
    cfg.grid_height = 2;
    cfg.num_agents = 12;
    cfg.zone_rates = {0.9, 0.1, 0.5, 0.0, 1.3, 0.2};
    cfg.ttl = 3;
    cfg.trip_pattern = matchenv::TripPattern::non_uniform;
    cfg.arrival = matchenv::ArrivalSchedule::sine;
    cfg.arrival_period = 97.0;
    cfg.arrival_amplitude = 0.8;
    matchenv::World w(cfg, numkit::mix_seed(seed, 21));
    numkit::Rng pol(numkit::mix_seed(seed, 22));
    // Each agent's next transition must start where the previous one ended.
    std::vector<int> last_next(cfg.num_agents, -1);
    long long violations = 0;
    for (long long t = 0; t < steps; ++t) {
      std::vector<matchenv::Experience> done =
          matchenv::world_step(w, [&](int, const matchenv::Observation&) {
            return pol.uniform_int(w.num_zones());
          });
      if (w.jobs_spawned() !=
          w.jobs_assigned() + w.jobs_expired() + w.jobs_queued())
        violations += 1;
      for (const matchenv::Job& j : w.queued_jobs())
        if (j.ttl < 1 || j.ttl > cfg.ttl) violations += 1;
      for (const matchenv::AgentState& a : w.agents()) {
        if (a.zone < 0 || a.zone >= w.num_zones()) violations += 1;
        if (a.busy && a.remaining < 1) violations += 1;
      }
      for (const matchenv::Experience& e : done) {
        if (e.reward < 0.0) violations += 1;
        if (last_next[e.agent] >= 0 && e.zone != last_next[e.agent])
          violations += 1;
        last_next[e.agent] = e.next_zone;
        if (e.completed_at <= e.decided_at) violations += 1;
      }
    }
    rep.check(violations == 0,
              fmt("conservation and TTL fuzz: %.0f violations over %.0f steps",
                  static_cast<double>(violations), static_cast<double>(steps)));
  }

  return rep;
}

CheckReport tabular_oracle(bool quick, uint64_t seed) {
  CheckReport rep;
  matchenv::EnvConfig cfg;
  cfg.grid_width = 2;
  cfg.grid_height = 1;
  cfg.num_agents = 1;
  cfg.zone_rates = {0.05, 0.05};
  cfg.ttl = 1;
  matchenv::World w(cfg, numkit::mix_seed(seed, 31));
  const int zones = 2;

  // Job present at a zone on any given step with probability 1 - e^{-rate};
  // the chain of forced assignments between two decisions gives the
  // expected revenue E_R and the next-decision-zone kernel N.
  double q[2];
  for (int z = 0; z < zones; ++z)
    q[z] = 1.0 - std::exp(-w.demand().mean_rate(z));
  const std::vector<double>* dest[2] = {&w.demand().destination_dist(0),
                                        &w.demand().destination_dist(1)};
  double N[2][2] = {{0, 0}, {0, 0}};
  double er[2] = {0, 0};
  for (int it = 0; it < 400; ++it) {
    double nn[2][2], ne[2];
    for (int v = 0; v < zones; ++v) {
      ne[v] = 0.0;
      for (int u = 0; u < zones; ++u)
        ne[v] += (*dest[v])[u] * (w.map().revenue(v, u) + er[u]);
      ne[v] *= q[v];
      for (int t = 0; t < zones; ++t) {
        double acc = (v == t ? 1.0 - q[v] : 0.0);
        for (int u = 0; u < zones; ++u) acc += q[v] * (*dest[v])[u] * N[u][t];
        nn[v][t] = acc;
      }
    }
    for (int v = 0; v < zones; ++v) {
      er[v] = ne[v];
      for (int t = 0; t < zones; ++t) N[v][t] = nn[v][t];
    }
  }

  learners::HyperParams hp;
  hp.gamma = 0.5;
  hp.alpha_anneal = true;
  hp.epsilon_start = 1.0;
  hp.epsilon_floor = 1.0;
  const long long steps = quick ? 4000000 : 60000000;
  const double tol = quick ? 5e-3 : 1e-3;
  double vi[2][2] = {{0, 0}, {0, 0}};
  for (int it = 0; it < 600; ++it) {
    double next[2][2];
    for (int z = 0; z < zones; ++z)
      for (int a = 0; a < zones; ++a) {
        double acc = er[a];
        for (int t = 0; t < zones; ++t)
          acc += hp.gamma * N[a][t] * std::max(vi[t][0], vi[t][1]);
        next[z][a] = acc;
      }
    for (int z = 0; z < zones; ++z)
      for (int a = 0; a < zones; ++a) vi[z][a] = next[z][a];
  }

  learners::TabularQLearner learner(zones, 1, hp, numkit::mix_seed(seed, 32),
                                    steps);
  for (long long t = 0; t < steps; ++t) {
    std::vector<matchenv::Experience> done = matchenv::world_step(
        w, [&](int, const matchenv::Observation& obs) {
          return learner.act(obs, t);
        });
    for (const matchenv::Experience& e : done) learner.observe(e);
  }
  const int bucket = hp.density_buckets - 1;
  double worst = 0.0;
  for (int z = 0; z < zones; ++z)
    for (int a = 0; a < zones; ++a)
      worst = std::max(worst, std::fabs(learner.q(z, bucket, a) - vi[z][a]));
  rep.check(worst < tol,
            fmt("tabular q vs value iteration: max |diff| %.2e (tol %.0e)",
                worst, tol));
  rep.note(fmt("  value iteration q(0,*) = %.6f %.6f", vi[0][0], vi[0][1]));
  rep.note(fmt("  learned         q(0,*) = %.6f %.6f",
               learner.q(0, bucket, 0), learner.q(0, bucket, 1)));
  return rep;
}

CheckReport bandit_oracle(bool quick, uint64_t seed) {
  CheckReport rep;
  const int runs = 10;
  const int iters = quick ? 1500 : 4000;
  int successes = 0;
  double worst_p = 1.0;
  for (int r = 0; r < runs; ++r) {
    learners::HyperParams hp;
    hp.gamma = 0.0;
    // The policy must move slower than the value baseline settles, or an
    // unlucky start can lock onto the dead arm before the advantage flips.
    hp.lr_policy = 0.02;
    hp.lr_value = 0.05;
    hp.dropout = 0.0;
    hp.k_step = 1;
    hp.hidden = {8};
    learners::A2cLearner learner(2, 1, hp, {}, numkit::mix_seed(seed, 41 + r),
                                 iters);
    matchenv::Observation obs{0, 1, 1.0};
    for (int t = 0; t < iters; ++t) {
      int a = learner.act(obs, t);
      matchenv::Experience e;
      e.zone = 0;
      e.count = 1;
      e.normalized = 1.0;
      e.action = a;
      e.reward = a == 1 ? 1.0 : 0.0;
      e.next_zone = 0;
      e.next_count = 1;
      e.next_normalized = 1.0;
      e.agent = 0;
      e.decided_at = t;
      e.completed_at = t + 1;
      learner.observe(e);
    }
    double p = learner.policy(obs)[1];
    worst_p = std::min(worst_p, p);
    if (p > 0.95) successes += 1;
  }
  rep.check(successes >= 9,
            fmt("bandit policy concentrates: %.0f/10 runs exceed 0.95 "
                "(worst final p = %.3f)",
                static_cast<double>(successes), worst_p));
  return rep;
}

}  // namespace verify
