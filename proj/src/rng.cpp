#include "gphsmm/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "gphsmm/errors.hpp"
#include "gphsmm/log_math.hpp"

namespace gphsmm {

std::uint64_t Rng::mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t Rng::index(std::size_t n) {
  if (n <= 1) return 0;
  // reject the partial block at the top of the range
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::sample_log(std::span<const double> log_weights) {
  const double total = log_sum_exp(log_weights);
  if (total == kLogZero || std::isnan(total))
    throw NumericError("cannot sample from an all-zero distribution");
  double u = uniform();
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    if (log_weights[i] == kLogZero) continue;
    const double p = std::exp(log_weights[i] - total);
    last_positive = i;
    if (u < p) return i;
    u -= p;
  }
  return last_positive;
}

}  // namespace gphsmm
