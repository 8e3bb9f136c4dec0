#include "matchenv/demand.hpp"

#include <cmath>
#include <stdexcept>

namespace matchenv {

DemandModel::DemandModel(const ZoneMap& map, DemandConfig cfg)
    : map_(map), cfg_(std::move(cfg)) {
  const int z = map_.num_zones();
  if (static_cast<int>(cfg_.zone_rates.size()) != z)
    throw std::runtime_error("demand: zone_rates size must equal zone count");
  for (double r : cfg_.zone_rates)
    if (!(r >= 0.0)) throw std::runtime_error("demand: rates must be >= 0");
  if (cfg_.amplitude < 0.0 || cfg_.amplitude > 1.0)
    throw std::runtime_error("demand: amplitude must be in [0, 1]");
  if (cfg_.period <= 0.0) throw std::runtime_error("demand: period must be > 0");

  dest_dist_.assign(z, std::vector<double>(z, 0.0));
  for (int origin = 0; origin < z; ++origin) {
    std::vector<double>& w = dest_dist_[origin];
    if (cfg_.pattern == TripPattern::uniform) {
      for (int d = 0; d < z; ++d) w[d] = 1.0;
    } else if (long_trip_origin(origin)) {
      for (int d = 0; d < z; ++d) {
        double dist = map_.distance(origin, d);
        w[d] = dist * dist * dist;
      }
    } else {
      for (int d = 0; d < z; ++d) {
        double dist = map_.distance(origin, d);
        w[d] = 1.0 / ((1.0 + dist) * (1.0 + dist));
      }
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    if (sum <= 0.0) {
      for (double& v : w) v = 1.0 / z;
    } else {
      for (double& v : w) v /= sum;
    }
  }
}

double DemandModel::rate_at(int zone, long long t) const {
  double base = cfg_.zone_rates[zone];
  switch (cfg_.schedule) {
    case ArrivalSchedule::constant:
      return base;
    case ArrivalSchedule::sine: {
      double phase = 6.283185307179586 * static_cast<double>(t) / cfg_.period;
      double r = base * (1.0 + cfg_.amplitude * std::sin(phase));
      return r > 0.0 ? r : 0.0;
    }
    case ArrivalSchedule::alternate: {
      // Demand swings between even and odd zones every half period; each
      // zone still averages its configured rate.
      long long half = static_cast<long long>(cfg_.period / 2.0);
      if (half < 1) half = 1;
      bool first_phase = (t / half) % 2 == 0;
      bool even_zone = zone % 2 == 0;
      return (first_phase == even_zone) ? 2.0 * base : 0.0;
    }
  }
  return base;
}

double DemandModel::total_mean_rate() const {
  double s = 0.0;
  for (double r : cfg_.zone_rates) s += r;
  return s;
}

int DemandModel::sample_destination(int origin, numkit::Rng& rng) const {
  const std::vector<double>& p = dest_dist_[origin];
  double u = rng.uniform();
  double acc = 0.0;
  for (size_t d = 0; d < p.size(); ++d) {
    acc += p[d];
    if (u < acc) return static_cast<int>(d);
  }
  return static_cast<int>(p.size()) - 1;
}

double DemandModel::expected_trip_distance(int origin) const {
  const std::vector<double>& p = dest_dist_[origin];
  double e = 0.0;
  for (size_t d = 0; d < p.size(); ++d)
    e += p[d] * map_.distance(origin, static_cast<int>(d));
  return e;
}

bool DemandModel::long_trip_origin(int zone) const {
  if (cfg_.pattern != TripPattern::non_uniform) return false;
  int n_long = map_.num_zones() / 5;
  if (n_long < 1) n_long = 1;
  return zone < n_long;
}

}  // namespace matchenv
