#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace gphsmm {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline double log_sum_exp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kLogZero;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kLogZero || !std::isfinite(m)) return m;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

}  // namespace gphsmm
