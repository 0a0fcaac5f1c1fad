#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace gphsmm {

/// Deterministic RNG with cheap derivation of independent child streams.
/// Every random draw in the library flows from one root seed through split().
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 1) : seed_(seed), engine_(mix(seed)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Child stream keyed by `stream`; independent of how much this stream was consumed.
  Rng split(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL))); }
  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();

  /// Samples an index with probability proportional to exp(log_weights[i]).
  /// Throws NumericError when every weight is log-zero.
  std::size_t sample_log(std::span<const double> log_weights);

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace gphsmm
