#include "matchenv/zonemap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace matchenv {

int ZoneMap::distance(int a, int b) const {
  int dx = std::abs(x_of(a) - x_of(b));
  int dy = std::abs(y_of(a) - y_of(b));
  dx = std::min(dx, width - dx);
  dy = std::min(dy, height - dy);
  return dx + dy;
}

int ZoneMap::travel_time(int a, int b) const {
  long k = std::lround(travel_time_scale * distance(a, b));
  return k < 1 ? 1 : static_cast<int>(k);
}

double ZoneMap::revenue(int a, int b) const {
  return revenue_base + revenue_per_distance * distance(a, b);
}

}  // namespace matchenv
