#pragma once
// Rectangular grid of zones with wrap-around Manhattan distances. The wrap
// keeps the geometry translation invariant, so every origin sees the same
// distance profile.

#include <vector>

namespace matchenv {

struct ZoneMap {
  int width = 1;
  int height = 1;
  double travel_time_scale = 1.0;
  double revenue_base = 1.0;
  double revenue_per_distance = 1.0;

  int num_zones() const { return width * height; }
  int x_of(int z) const { return z % width; }
  int y_of(int z) const { return z / width; }
  int zone_at(int x, int y) const { return y * width + x; }

  int distance(int a, int b) const;
  int travel_time(int a, int b) const;  // at least one step
  double revenue(int a, int b) const;
};

}  // namespace matchenv
