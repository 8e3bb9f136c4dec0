#include "harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "numkit/mathfn.hpp"

namespace harness {

namespace {

// Every k-th completed transition of an occupancy-estimating learner is
// scored against the realized idle distribution.
constexpr int kDensitySampleStride = 16;

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, uint64_t seed) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  matchenv::World world(cfg.env, numkit::mix_seed(seed, 101));
  const int zones = world.num_zones();
  const int agents = world.num_agents();
  const learners::LearnerKind kind = cfg.kind();
  const long long budget = cfg.steps;

  std::vector<std::shared_ptr<learners::Learner>> brains;
  std::vector<learners::Learner*> of_agent(agents);
  if (cfg.shared_brain) {
    brains.push_back(learners::make_learner(kind, zones, agents, cfg.hp,
                                            cfg.density_head_flag(),
                                            numkit::mix_seed(seed, 200),
                                            budget));
    for (int a = 0; a < agents; ++a) of_agent[a] = brains[0].get();
  } else {
    brains.reserve(agents);
    for (int a = 0; a < agents; ++a) {
      brains.push_back(learners::make_learner(
          kind, zones, agents, cfg.hp, cfg.density_head_flag(),
          numkit::mix_seed(seed, 200 + a), budget));
      of_agent[a] = brains.back().get();
    }
  }

  const bool mean_field = kind == learners::LearnerKind::mmfq;
  std::vector<std::vector<double>> action_counts(
      zones, std::vector<double>(zones, 0.0));

  RunResult result;
  result.learner = cfg.learner;
  result.seed = seed;
  result.num_agents = agents;
  result.training_periods = budget / cfg.eval_period;
  result.steps = budget;

  std::vector<double> revenue_mark(agents, 0.0);
  std::vector<double> period_revenue(agents, 0.0);
  std::vector<double> welfare_history;
  const double nan = std::nan("");
  double mse_sum = 0.0, ent_sum = 0.0;
  long long mse_n = 0, density_seen = 0;
  std::vector<int> actions;

  // Learners train for the whole run; the converged window is the last
  // converged_periods of the same run, by which point epsilon has decayed
  // to its floor.
  for (long long step = 0; step < budget; ++step) {
    matchenv::World::StepBegin sb = world.begin_step();
    for (const matchenv::Experience& e : sb.completed) {
      learners::Learner* L = of_agent[e.agent];
      L->observe(e);
      if (L->density_active()) {
        density_seen += 1;
        if (density_seen % kDensitySampleStride == 0) {
          std::vector<double> p = L->predict_density(e.zone, e.count, e.action);
          const matchenv::PopulationDistribution& pop =
              world.population_distribution();
          double mse = 0.0;
          for (int z = 0; z < zones; ++z) {
            double d = p[z] - pop.normalized[z];
            mse += d * d;
          }
          mse_sum += mse;
          ent_sum += numkit::entropy(p);
          mse_n += 1;
        }
      }
    }
    actions.resize(sb.deciders.size());
    for (size_t i = 0; i < sb.deciders.size(); ++i) {
      const matchenv::Observation& obs = sb.observations[i];
      actions[i] = of_agent[sb.deciders[i]]->act(obs, step);
      if (mean_field)
        action_counts[obs.zone][actions[i]] += 1.0;
    }
    world.finish_step(actions);

    if ((step + 1) % cfg.eval_period == 0) {
      for (auto& b : brains) b->on_period_end();
      if (mean_field) {
        std::vector<std::vector<double>> table(
            zones, std::vector<double>(zones, 1.0 / zones));
        for (int z = 0; z < zones; ++z) {
          double total = 0.0;
          for (double c : action_counts[z]) total += c;
          if (total > 0.0)
            for (int a = 0; a < zones; ++a)
              table[z][a] = action_counts[z][a] / total;
          action_counts[z].assign(zones, 0.0);
        }
        for (auto& b : brains) b->set_mean_actions(table);
      }

      for (int a = 0; a < agents; ++a) {
        double now = world.revenue_total(a);
        period_revenue[a] = now - revenue_mark[a];
        revenue_mark[a] = now;
      }
      PeriodRecord rec;
      rec.period = (step + 1) / cfg.eval_period;
      rec.welfare = social_welfare(period_revenue);
      welfare_history.push_back(rec.welfare);
      size_t tail = std::min<size_t>(welfare_history.size(), 100);
      double avg = 0.0;
      for (size_t i = welfare_history.size() - tail; i < welfare_history.size();
           ++i)
        avg += welfare_history[i];
      rec.running_avg = avg / static_cast<double>(tail);
      rec.density_mse = mse_n > 0 ? mse_sum / mse_n : nan;
      rec.entropy_mean = mse_n > 0 ? ent_sum / mse_n : nan;
      mse_sum = ent_sum = 0.0;
      mse_n = 0;
      rec.epsilon = learners::epsilon_at(step + 1, budget, cfg.hp.epsilon_start,
                                         cfg.hp.epsilon_floor);
      result.periods.push_back(rec);
      result.agent_revenue.push_back(period_revenue);
    }
  }

  finalize_run(result, cfg.converged_periods);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace harness
