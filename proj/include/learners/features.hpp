#pragma once
// Input encodings for the network learners: one-hot zone plus normalized
// local occupancy, optionally followed by a mean-action row.

#include <span>
#include <vector>

namespace learners {

inline int obs_feature_size(int zones) { return zones + 1; }
inline int mmf_feature_size(int zones) { return 2 * zones + 1; }

inline void encode_obs(int zone, double normalized, int zones,
                       std::vector<double>& out) {
  out.assign(zones + 1, 0.0);
  out[zone] = 1.0;
  out[zones] = normalized;
}

inline void encode_mmf(int zone, double normalized,
                       std::span<const double> mean_row, int zones,
                       std::vector<double>& out) {
  out.assign(2 * zones + 1, 0.0);
  out[zone] = 1.0;
  out[zones] = normalized;
  for (int i = 0; i < zones; ++i) out[zones + 1 + i] = mean_row[i];
}

}  // namespace learners
