#include "harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numkit/mathfn.hpp"

namespace harness {

namespace {

double interp(const std::vector<double>& sorted, double q) {
  const size_t n = sorted.size();
  double pos = q * static_cast<double>(n - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::runtime_error("quartiles: empty input");
  std::sort(values.begin(), values.end());
  Quartiles q;
  q.min = values.front();
  q.q1 = interp(values, 0.25);
  q.median = interp(values, 0.5);
  q.q3 = interp(values, 0.75);
  q.max = values.back();
  return q;
}

double social_welfare(std::span<const double> per_agent_revenue) {
  return numkit::mean(per_agent_revenue);
}

void finalize_run(RunResult& r, int converged_periods) {
  const long long total = static_cast<long long>(r.periods.size());
  long long window = std::min<long long>(converged_periods, total);
  if (window <= 0) window = total;
  const long long start = total - window;

  r.converged_agent_means.assign(r.num_agents, 0.0);
  double welfare = 0.0;
  double mse_sum = 0.0, ent_sum = 0.0;
  long long mse_n = 0;
  for (long long p = start; p < total; ++p) {
    welfare += r.periods[p].welfare;
    for (int a = 0; a < r.num_agents; ++a)
      r.converged_agent_means[a] += r.agent_revenue[p][a];
    if (std::isfinite(r.periods[p].density_mse)) {
      mse_sum += r.periods[p].density_mse;
      ent_sum += r.periods[p].entropy_mean;
      mse_n += 1;
    }
  }
  const double inv = 1.0 / static_cast<double>(window);
  welfare *= inv;
  for (double& v : r.converged_agent_means) v *= inv;
  r.converged_welfare = welfare;
  r.fairness_std = numkit::population_std(r.converged_agent_means);
  r.fairness = quartiles(r.converged_agent_means);
  const double nan = std::nan("");
  r.density_mse_mean = mse_n > 0 ? mse_sum / mse_n : nan;
  r.entropy_mean = mse_n > 0 ? ent_sum / mse_n : nan;
}

}  // namespace harness
