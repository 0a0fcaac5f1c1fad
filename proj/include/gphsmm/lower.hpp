#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gphsmm/gp.hpp"
#include "gphsmm/lattice.hpp"
#include "gphsmm/rng.hpp"
#include "gphsmm/types.hpp"

namespace gphsmm {

/// Poisson segment-length distribution renormalized over [1, max_len].
class DurationModel {
 public:
  DurationModel(double lambda, std::size_t max_len);

  /// Throws std::out_of_range unless 1 <= k <= max_len.
  double log_pmf(std::size_t k) const;
  std::span<const double> log_table() const { return log_pmf_; }
  double lambda() const { return lambda_; }
  std::size_t max_len() const { return log_pmf_.size(); }

 private:
  double lambda_;
  std::vector<double> log_pmf_;
};

/// Dirichlet-smoothed initial and pairwise transition counts over a state sequence.
/// Used for element-to-element transitions and for unit-to-unit transitions.
class TransitionTable {
 public:
  TransitionTable(std::size_t num_states, double smoothing);

  void add(std::span<const int> states) { update(states, 1.0); }
  void remove(std::span<const int> states) { update(states, -1.0); }
  void clear();

  double initial(std::size_t s) const;
  double trans(std::size_t prev, std::size_t next) const;
  double initial_count(std::size_t s) const { return initial_[s]; }
  double pair_count(std::size_t prev, std::size_t next) const { return pairs_[prev * states_ + next]; }
  double total_transitions() const;
  std::size_t num_states() const { return states_; }
  double smoothing() const { return smoothing_; }

 private:
  void update(std::span<const int> states, double sign);

  std::size_t states_;
  double smoothing_;
  std::vector<double> initial_;
  std::vector<double> pairs_;
  std::vector<double> rows_;
  double starts_ = 0.0;
};

/// Where an element sat inside its unit motion in the previous alignment.
enum class UnitPosition { Begin = 0, Middle = 1, End = 2 };

/// Downward message P(c | b) used as the element prior, resolved by unit class,
/// position within the unit and the preceding element class.
class ElementPrior {
 public:
  /// Uniform prior (before any upper-layer pass).
  static ElementPrior uniform(std::size_t num_elements, std::size_t num_units);

  /// begin: [b][c]; middle and end: [b][prev][c]. Each distribution must already be normalized.
  ElementPrior(std::size_t num_elements, std::size_t num_units, std::vector<double> begin,
               std::vector<double> middle, std::vector<double> end);

  bool is_uniform() const { return uniform_; }
  std::size_t num_elements() const { return elements_; }
  std::size_t num_units() const { return units_; }

  /// `prev` < 0 means no preceding element; the begin distribution is used then.
  double prob(std::size_t c, std::size_t b, UnitPosition pos, int prev) const;

 private:
  ElementPrior(std::size_t num_elements, std::size_t num_units);

  std::size_t elements_, units_;
  bool uniform_ = true;
  std::vector<double> begin_, middle_, end_;
};

/// Context ids for the lower lattice: 0 is "no unit context"; 1 + 3*b + position otherwise.
std::size_t prior_context_id(std::size_t unit_class, UnitPosition pos);
std::size_t num_prior_contexts(std::size_t num_units);

/// Per-sample context from the previous iteration's element and unit alignment.
/// Returns all zeros when `units` is empty.
std::vector<std::size_t> unit_context(const ElementSegmentation& elements,
                                      const UnitSegmentation& units, std::size_t length,
                                      std::size_t num_units);

/// Product-of-experts transitions: pi(c | c') * P(c | b, position, c') renormalized over c,
/// one table per prior context.
hsmm::ContextTransitions lower_transitions(const TransitionTable& trans, const ElementPrior& prior);

/// Segment log-likelihoods under each class's GP for every (start, length, class).
hsmm::SegmentScoreTable score_segments(const TimeSeries& series,
                                       std::span<const GpClassModel> gps, std::size_t max_len);

using ForwardLattice = hsmm::Lattice;

ForwardLattice forward_filter(const hsmm::SegmentScoreTable& scores, const TransitionTable& trans,
                              const DurationModel& dur, const ElementPrior& prior,
                              std::span<const std::size_t> context);

ForwardLattice forward_filter(const TimeSeries& series, std::span<const GpClassModel> gps,
                              const TransitionTable& trans, const DurationModel& dur,
                              const ElementPrior& prior, std::span<const std::size_t> context);

ElementSegmentation backward_sample(const ForwardLattice& lattice, const TransitionTable& trans,
                                    const ElementPrior& prior, std::span<const std::size_t> context,
                                    Rng& rng, std::string series_id = {});

/// Collapsed Gibbs state of the lower layer: per-class GPs and element transitions
/// over a whole corpus, plus each sequence's current segmentation.
class LowerLayer {
 public:
  LowerLayer(const std::vector<TimeSeries>& corpus, const Hyperparams& h, std::uint64_t gp_seed);

  /// Random cut points (geometric lengths with mean lambda_p) and random classes.
  void initialize_random(Rng& rng);
  /// Replaces the assignment of sequence i (used by tests and checkpoint restore).
  void assign(std::size_t i, ElementSegmentation seg);

  /// Removes sequence i from the statistics, draws a fresh segmentation from the
  /// forward lattice and adds it back.
  void resample_sequence(std::size_t i, const ElementPrior& prior,
                         std::span<const std::size_t> context, Rng& rng);

  /// Log score of the current segmentation of sequence i under the current
  /// (non-collapsed) statistics: GP, duration and transition factors.
  double sequence_log_score(std::size_t i, const ElementPrior& prior,
                            std::span<const std::size_t> context) const;

  const ElementSegmentation& segmentation(std::size_t i) const { return segs_[i]; }
  bool assigned(std::size_t i) const { return !segs_[i].segments.empty(); }
  const std::vector<ElementSegmentation>& segmentations() const { return segs_; }
  const std::vector<GpClassModel>& gps() const { return gps_; }
  const TransitionTable& transitions() const { return trans_; }
  const DurationModel& duration() const { return dur_; }
  std::size_t max_len() const { return max_len_; }

 private:
  void add(std::size_t i);
  void remove(std::size_t i);

  const std::vector<TimeSeries>& corpus_;
  std::size_t max_len_;
  std::vector<GpClassModel> gps_;
  TransitionTable trans_;
  DurationModel dur_;
  std::vector<ElementSegmentation> segs_;
};

}  // namespace gphsmm
