#pragma once
// Per-zone Poisson job arrivals with optional time variation, plus trip
// destination distributions per origin.

#include <vector>

#include "matchenv/zonemap.hpp"
#include "numkit/rng.hpp"

namespace matchenv {

enum class ArrivalSchedule { constant, sine, alternate };
enum class TripPattern { uniform, non_uniform };

struct DemandConfig {
  std::vector<double> zone_rates;  // mean arrivals per step per zone
  ArrivalSchedule schedule = ArrivalSchedule::constant;
  double period = 200.0;     // steps per cycle for sine / alternate
  double amplitude = 0.5;    // relative swing for sine, in [0, 1]
  TripPattern pattern = TripPattern::uniform;
};

class DemandModel {
public:
  DemandModel(const ZoneMap& map, DemandConfig cfg);

  // Instantaneous arrival rate; time averages back to the configured mean.
  double rate_at(int zone, long long t) const;
  double mean_rate(int zone) const { return cfg_.zone_rates[zone]; }
  double total_mean_rate() const;

  int sample_destination(int origin, numkit::Rng& rng) const;
  const std::vector<double>& destination_dist(int origin) const {
    return dest_dist_[origin];
  }
  double expected_trip_distance(int origin) const;
  bool long_trip_origin(int zone) const;

private:
  ZoneMap map_;
  DemandConfig cfg_;
  std::vector<std::vector<double>> dest_dist_;  // per origin, sums to 1
};

}  // namespace matchenv
