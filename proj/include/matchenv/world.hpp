#pragma once
// The matching market simulator. Each step runs a fixed phase order:
// job arrivals, anonymous assignment of idle agents, decisions for the
// remaining idle agents, job expiry, then travel countdown and arrivals.
//
// Agents observe only their own zone and how many idle agents share it.
// A finished transition is handed back at the agent's next decision point,
// with the reward equal to all revenue banked since the previous decision.

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "matchenv/demand.hpp"
#include "matchenv/zonemap.hpp"
#include "numkit/rng.hpp"

namespace matchenv {

struct EnvConfig {
  int grid_width = 5;
  int grid_height = 2;
  int num_agents = 20;
  double dar = 0.6;                // demand-to-agent ratio when rates are implicit
  std::vector<double> zone_rates;  // explicit per-zone mean rates (overrides dar)
  int ttl = 2;
  TripPattern trip_pattern = TripPattern::uniform;
  ArrivalSchedule arrival = ArrivalSchedule::constant;
  double arrival_period = 200.0;
  double arrival_amplitude = 0.5;
  double travel_time_scale = 1.0;
  double revenue_base = 1.0;
  double revenue_per_distance = 1.0;

  void validate() const;  // throws std::runtime_error with the failing field
  int num_zones() const { return grid_width * grid_height; }
  std::vector<double> effective_rates() const;
  double effective_dar() const;
};

struct Job {
  int origin = 0;
  int dest = 0;
  double revenue = 0.0;
  int ttl = 0;
};

struct Observation {
  int zone = 0;
  int count = 0;           // idle agents sharing the zone, self included
  double normalized = 0.0; // count / num_agents
};

struct Experience {
  int zone = 0;
  int count = 0;
  double normalized = 0.0;
  int action = 0;
  double reward = 0.0;
  int next_zone = 0;
  int next_count = 0;
  double next_normalized = 0.0;
  int agent = 0;
  long long decided_at = 0;
  long long completed_at = 0;
};

struct AgentState {
  int zone = 0;
  bool busy = false;
  int dest = 0;
  int remaining = 0;        // travel steps left
  double job_revenue = 0.0; // banked when travel finishes
};

struct PopulationDistribution {
  std::vector<int> counts;          // idle agents per zone at decision time
  std::vector<double> normalized;   // counts / total, all zero if none idle
  int total = 0;
};

class World {
public:
  World(const EnvConfig& cfg, uint64_t seed);

  struct StepBegin {
    std::vector<int> deciders;             // agent ids awaiting an action
    std::vector<Observation> observations; // aligned with deciders
    std::vector<Experience> completed;     // transitions closed this step
  };

  // Phases: arrivals, assignment, then observation snapshot. The returned
  // experiences belong to agents in `deciders` whose previous decision just
  // closed.
  StepBegin begin_step();

  // `actions` are target zones aligned with the deciders of the matching
  // begin_step call. Runs expiry and travel phases and advances time.
  void finish_step(std::span<const int> actions);

  long long time() const { return t_; }
  int num_agents() const { return static_cast<int>(agents_.size()); }
  int num_zones() const { return map_.num_zones(); }
  const ZoneMap& map() const { return map_; }
  const DemandModel& demand() const { return demand_; }
  const EnvConfig& config() const { return cfg_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  double revenue_total(int agent) const { return total_revenue_[agent]; }
  double dar() const { return demand_.total_mean_rate() / num_agents(); }

  // Snapshot taken at the last decision phase. Not visible to learners.
  const PopulationDistribution& population_distribution() const { return pop_; }

  long long jobs_spawned() const { return jobs_spawned_; }
  long long jobs_assigned() const { return jobs_assigned_; }
  long long jobs_expired() const { return jobs_expired_; }
  long long jobs_queued() const;
  std::vector<Job> queued_jobs() const;  // flattened copy, test inspection

  // Setup and test hooks.
  void place_agents(std::span<const int> zones);
  void add_job(int origin, int dest);

private:
  void spawn_jobs();
  void assign_jobs();
  void expire_jobs();
  void advance_travel();

  ZoneMap map_;
  DemandModel demand_;
  EnvConfig cfg_;
  numkit::Rng rng_;
  long long t_ = 0;
  std::vector<AgentState> agents_;
  std::vector<std::deque<Job>> queues_;
  std::vector<double> total_revenue_;

  struct Pending {
    bool active = false;
    int zone = 0;
    int count = 0;
    double normalized = 0.0;
    int action = 0;
    double reward = 0.0;
    long long decided_at = 0;
  };
  std::vector<Pending> pending_;

  PopulationDistribution pop_;
  std::vector<int> deciders_;
  bool awaiting_actions_ = false;

  long long jobs_spawned_ = 0;
  long long jobs_assigned_ = 0;
  long long jobs_expired_ = 0;
};

// Convenience wrapper running one full step with a policy callback.
std::vector<Experience> world_step(
    World& world,
    const std::function<int(int agent, const Observation&)>& policy);

}  // namespace matchenv
