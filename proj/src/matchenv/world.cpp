#include "matchenv/world.hpp"

#include <stdexcept>

namespace matchenv {

void EnvConfig::validate() const {
  if (grid_width < 1 || grid_height < 1)
    throw std::runtime_error("env: grid dimensions must be >= 1");
  if (num_zones() < 2) throw std::runtime_error("env: need at least 2 zones");
  if (num_agents < 1) throw std::runtime_error("env: need at least 1 agent");
  if (ttl < 1) throw std::runtime_error("env: ttl must be >= 1");
  if (!zone_rates.empty() &&
      static_cast<int>(zone_rates.size()) != num_zones())
    throw std::runtime_error("env: zone_rates must list one rate per zone");
  for (double r : zone_rates)
    if (!(r >= 0.0)) throw std::runtime_error("env: zone_rates must be >= 0");
  if (zone_rates.empty() && !(dar >= 0.0))
    throw std::runtime_error("env: dar must be >= 0");
  if (travel_time_scale <= 0.0)
    throw std::runtime_error("env: travel_time_scale must be > 0");
  if (arrival_period <= 0.0)
    throw std::runtime_error("env: arrival_period must be > 0");
  if (arrival_amplitude < 0.0 || arrival_amplitude > 1.0)
    throw std::runtime_error("env: arrival_amplitude must be in [0, 1]");
}

std::vector<double> EnvConfig::effective_rates() const {
  if (!zone_rates.empty()) return zone_rates;
  double per_zone = dar * num_agents / num_zones();
  return std::vector<double>(num_zones(), per_zone);
}

double EnvConfig::effective_dar() const {
  double total = 0.0;
  for (double r : effective_rates()) total += r;
  return total / num_agents;
}

namespace {

DemandConfig make_demand_config(const EnvConfig& cfg) {
  DemandConfig d;
  d.zone_rates = cfg.effective_rates();
  d.schedule = cfg.arrival;
  d.period = cfg.arrival_period;
  d.amplitude = cfg.arrival_amplitude;
  d.pattern = cfg.trip_pattern;
  return d;
}

ZoneMap make_map(const EnvConfig& cfg) {
  ZoneMap m;
  m.width = cfg.grid_width;
  m.height = cfg.grid_height;
  m.travel_time_scale = cfg.travel_time_scale;
  m.revenue_base = cfg.revenue_base;
  m.revenue_per_distance = cfg.revenue_per_distance;
  return m;
}

}  // namespace

World::World(const EnvConfig& cfg, uint64_t seed)
    : map_(make_map(cfg)),
      demand_(map_, make_demand_config(cfg)),
      cfg_(cfg),
      rng_(seed) {
  cfg_.validate();
  agents_.resize(cfg_.num_agents);
  pending_.resize(cfg_.num_agents);
  total_revenue_.assign(cfg_.num_agents, 0.0);
  queues_.resize(map_.num_zones());
  for (AgentState& a : agents_) a.zone = rng_.uniform_int(map_.num_zones());
  pop_.counts.assign(map_.num_zones(), 0);
  pop_.normalized.assign(map_.num_zones(), 0.0);
}

void World::place_agents(std::span<const int> zones) {
  if (static_cast<int>(zones.size()) != num_agents())
    throw std::runtime_error("place_agents: need one zone per agent");
  for (int i = 0; i < num_agents(); ++i) {
    if (zones[i] < 0 || zones[i] >= map_.num_zones())
      throw std::runtime_error("place_agents: zone out of range");
    agents_[i] = AgentState{};
    agents_[i].zone = zones[i];
    pending_[i] = Pending{};
  }
}

void World::add_job(int origin, int dest) {
  if (origin < 0 || origin >= map_.num_zones() || dest < 0 ||
      dest >= map_.num_zones())
    throw std::runtime_error("add_job: zone out of range");
  queues_[origin].push_back(
      Job{origin, dest, map_.revenue(origin, dest), cfg_.ttl});
  jobs_spawned_ += 1;
}

long long World::jobs_queued() const {
  long long n = 0;
  for (const auto& q : queues_) n += static_cast<long long>(q.size());
  return n;
}

std::vector<Job> World::queued_jobs() const {
  std::vector<Job> out;
  for (const auto& q : queues_) out.insert(out.end(), q.begin(), q.end());
  return out;
}

void World::spawn_jobs() {
  for (int z = 0; z < map_.num_zones(); ++z) {
    int n = rng_.poisson(demand_.rate_at(z, t_));
    for (int i = 0; i < n; ++i) {
      int dest = demand_.sample_destination(z, rng_);
      queues_[z].push_back(Job{z, dest, map_.revenue(z, dest), cfg_.ttl});
      jobs_spawned_ += 1;
    }
  }
}

void World::assign_jobs() {
  std::vector<std::vector<int>> idle_by_zone(map_.num_zones());
  for (int i = 0; i < num_agents(); ++i)
    if (!agents_[i].busy) idle_by_zone[agents_[i].zone].push_back(i);
  for (int z = 0; z < map_.num_zones(); ++z) {
    std::vector<int>& idle = idle_by_zone[z];
    std::deque<Job>& jobs = queues_[z];
    int m = std::min<int>(static_cast<int>(idle.size()),
                          static_cast<int>(jobs.size()));
    // Uniform anonymous pick of m agents out of the idle pool.
    for (int i = 0; i < m; ++i) {
      int j = i + rng_.uniform_int(static_cast<int>(idle.size()) - i);
      std::swap(idle[i], idle[j]);
      const Job job = jobs.front();
      jobs.pop_front();
      AgentState& a = agents_[idle[i]];
      a.busy = true;
      a.dest = job.dest;
      a.remaining = map_.travel_time(z, job.dest);
      a.job_revenue = job.revenue;
      jobs_assigned_ += 1;
    }
  }
}

World::StepBegin World::begin_step() {
  if (awaiting_actions_)
    throw std::runtime_error("world: begin_step called twice without actions");
  spawn_jobs();
  assign_jobs();

  deciders_.clear();
  for (int i = 0; i < num_agents(); ++i)
    if (!agents_[i].busy) deciders_.push_back(i);

  pop_.counts.assign(map_.num_zones(), 0);
  for (int id : deciders_) pop_.counts[agents_[id].zone] += 1;
  pop_.total = static_cast<int>(deciders_.size());
  for (int z = 0; z < map_.num_zones(); ++z)
    pop_.normalized[z] =
        pop_.total > 0 ? static_cast<double>(pop_.counts[z]) / pop_.total : 0.0;

  StepBegin out;
  out.deciders = deciders_;
  out.observations.reserve(deciders_.size());
  const double inv_n = 1.0 / num_agents();
  for (int id : deciders_) {
    Observation obs;
    obs.zone = agents_[id].zone;
    obs.count = pop_.counts[obs.zone];
    obs.normalized = obs.count * inv_n;
    out.observations.push_back(obs);
    Pending& p = pending_[id];
    if (p.active) {
      Experience e;
      e.zone = p.zone;
      e.count = p.count;
      e.normalized = p.normalized;
      e.action = p.action;
      e.reward = p.reward;
      e.next_zone = obs.zone;
      e.next_count = obs.count;
      e.next_normalized = obs.normalized;
      e.agent = id;
      e.decided_at = p.decided_at;
      e.completed_at = t_;
      out.completed.push_back(e);
      p.active = false;
    }
  }
  awaiting_actions_ = true;
  return out;
}

void World::finish_step(std::span<const int> actions) {
  if (!awaiting_actions_)
    throw std::runtime_error("world: finish_step without begin_step");
  if (actions.size() != deciders_.size())
    throw std::runtime_error("world: need one action per decider");
  const double inv_n = 1.0 / num_agents();
  for (size_t k = 0; k < actions.size(); ++k) {
    int id = deciders_[k];
    int target = actions[k];
    if (target < 0 || target >= map_.num_zones())
      throw std::runtime_error("world: action zone out of range");
    AgentState& a = agents_[id];
    Pending& p = pending_[id];
    p.active = true;
    p.zone = a.zone;
    p.count = pop_.counts[a.zone];
    p.normalized = p.count * inv_n;
    p.action = target;
    p.reward = 0.0;
    p.decided_at = t_;
    a.busy = true;
    a.dest = target;
    a.remaining = map_.travel_time(a.zone, target);
    a.job_revenue = 0.0;
  }
  expire_jobs();
  advance_travel();
  awaiting_actions_ = false;
  t_ += 1;
}

void World::expire_jobs() {
  for (auto& q : queues_) {
    for (Job& j : q) j.ttl -= 1;
    while (!q.empty() && q.front().ttl <= 0) {
      q.pop_front();
      jobs_expired_ += 1;
    }
  }
}

void World::advance_travel() {
  for (int i = 0; i < num_agents(); ++i) {
    AgentState& a = agents_[i];
    if (!a.busy) continue;
    a.remaining -= 1;
    if (a.remaining > 0) continue;
    a.busy = false;
    a.zone = a.dest;
    a.remaining = 0;
    if (a.job_revenue != 0.0) {
      total_revenue_[i] += a.job_revenue;
      if (pending_[i].active) pending_[i].reward += a.job_revenue;
      a.job_revenue = 0.0;
    }
  }
}

std::vector<Experience> world_step(
    World& world,
    const std::function<int(int agent, const Observation&)>& policy) {
  World::StepBegin sb = world.begin_step();
  std::vector<int> actions(sb.deciders.size());
  for (size_t i = 0; i < sb.deciders.size(); ++i)
    actions[i] = policy(sb.deciders[i], sb.observations[i]);
  world.finish_step(actions);
  return std::move(sb.completed);
}

}  // namespace matchenv
