#pragma once
// Small numeric helpers shared by the network code and the learners.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace numkit {

// Numerically stable softmax: subtracts the max before exponentiating.
inline void softmax_into(std::span<const double> logits, std::span<double> out) {
  double mx = logits[0];
  for (double v : logits)
    if (v > mx) mx = v;
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  double inv = 1.0 / sum;
  for (size_t i = 0; i < out.size(); ++i) out[i] *= inv;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  softmax_into(logits, out);
  return out;
}

// Shannon entropy of a distribution, natural log, with 0*log(0) = 0.
inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation (divides by n).
inline double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace numkit
