#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gphsmm/types.hpp"

namespace gphsmm {

struct Wave {
  double amplitude = 0.0;
  double frequency = 0.0;  // radians per sample
  double phase = 0.0;
};

/// Smooth template curve of one element label: offset plus a sum of sinusoids per
/// dimension, evaluated at the within-element sample index.
struct Prototype {
  std::vector<double> offset;             // [dim]
  std::vector<std::vector<Wave>> waves;   // [dim][component]

  double value(std::size_t d, double t) const;
};

struct SynthConfig {
  std::size_t dim = 6;
  double rate_hz = 5.0;
  int workers = 3;
  int cycles_per_worker = 36;
  int num_element_labels = 8;
  /// Canonical element-label string of each unit class.
  std::vector<std::vector<int>> unit_elements;
  /// Unit classes performed in one cycle, in order.
  std::vector<int> procedure;
  /// Explicit templates, one per element label; random smooth curves when empty.
  std::vector<Prototype> prototypes;
  int waves_per_dim = 2;

  double mean_duration = 18.0;     // samples per element
  double duration_jitter = 0.15;   // relative sd of each element's duration
  double worker_speed_spread = 0.2;
  int min_element_len = 3;
  int max_element_len = 40;
  /// Accepted sequence length range in seconds; 0 disables the bound.
  double min_seconds = 0.0;
  double max_seconds = 0.0;

  double noise_sigma = 0.1;
  /// Per-element probability of a substitution or a swap with its successor.
  double fluctuation = 0.0;
};

struct SynthCorpus {
  std::vector<TimeSeries> series;
  std::vector<ElementSegmentation> elements;
  std::vector<UnitSegmentation> units;
  std::vector<int> worker;
  std::vector<Prototype> prototypes;
};

/// 3 units over 8 element labels shaped like an assembly procedure
/// (1 2 3 | 4 5 4 5 4 5 | 6 7 8), 36 cycles by 3 workers at 5 Hz, 29 to 65 s each.
SynthConfig assembly_preset();

/// Throws ConfigError on an inconsistent configuration.
void validate_synth_config(const SynthConfig& cfg);

SynthCorpus generate(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace gphsmm
