#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gphsmm/emission.hpp"
#include "gphsmm/lattice.hpp"
#include "gphsmm/lower.hpp"
#include "gphsmm/rng.hpp"
#include "gphsmm/types.hpp"

namespace gphsmm {

using UnitTransitionTable = TransitionTable;
using UnitForwardLattice = hsmm::Lattice;

/// P(c_{j-k:j} | b) under one of the three count-based formulations.
class EmissionModel {
 public:
  EmissionModel(EmissionMode mode, const EmissionCounts& counts, double alpha);

  double log_prob(std::span<const int> sub, std::size_t b) const {
    return log_emission(mode_, sub, b, counts_, alpha_);
  }
  EmissionMode mode() const { return mode_; }
  std::size_t num_units() const { return counts_.num_units(); }

 private:
  EmissionMode mode_;
  const EmissionCounts& counts_;
  double alpha_;
};

/// Emission log-probabilities for every (start, length, unit class) of `elements`.
hsmm::SegmentScoreTable score_units(std::span<const int> elements, const EmissionModel& em,
                                    std::size_t max_len);

/// Single-context transition factors of the unit chain.
hsmm::ContextTransitions unit_transitions(const UnitTransitionTable& trans);

UnitForwardLattice unit_forward_filter(std::span<const int> elements, const EmissionModel& em,
                                       const UnitTransitionTable& trans, const DurationModel& dur);

UnitSegmentation unit_backward_sample(const UnitForwardLattice& lattice,
                                      const UnitTransitionTable& trans, Rng& rng,
                                      std::string series_id = {});

/// Collapsed Gibbs state of the upper layer over a corpus of element strings.
class UpperLayer {
 public:
  UpperLayer(std::size_t num_sequences, const Hyperparams& h, EmissionMode mode);

  /// Removes sequence i's previous contribution (if any), samples unit segments for
  /// `elements` against the rest of the corpus and adds the result back.
  void resample_unit_sequence(std::size_t i, std::span<const int> elements,
                              const std::string& series_id, Rng& rng);

  /// Log score of sequence i's current units: emission, duration and transitions
  /// under the current full counts.
  double sequence_log_score(std::size_t i) const;

  bool assigned(std::size_t i) const { return !units_[i].segments.empty(); }
  const UnitSegmentation& segmentation(std::size_t i) const { return units_[i]; }
  const std::vector<UnitSegmentation>& segmentations() const { return units_; }
  const std::vector<int>& elements(std::size_t i) const { return elements_[i]; }
  const EmissionCounts& counts() const { return counts_; }
  const UnitTransitionTable& transitions() const { return trans_; }
  EmissionMode mode() const { return mode_; }

 private:
  static std::vector<int> unit_classes(const UnitSegmentation& u);

  EmissionMode mode_;
  double alpha_;
  std::size_t max_len_;
  EmissionCounts counts_;
  UnitTransitionTable trans_;
  DurationModel dur_;
  std::vector<std::vector<int>> elements_;
  std::vector<UnitSegmentation> units_;
};

}  // namespace gphsmm
