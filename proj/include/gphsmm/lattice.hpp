#pragma once

// Log-domain forward filtering / backward sampling for explicit-duration
// (semi-Markov) chains. Both layers of the segmenter run on this engine: the
// lower layer over samples with GP segment scores, the upper layer over
// motion elements with emission scores.

#include <cstddef>
#include <span>
#include <vector>

#include "gphsmm/log_math.hpp"
#include "gphsmm/rng.hpp"

namespace gphsmm::hsmm {

/// score(start, len, state) = log p(observations[start, start+len) | state).
class SegmentScoreTable {
 public:
  SegmentScoreTable() = default;
  SegmentScoreTable(std::size_t length, std::size_t max_len, std::size_t num_states)
      : length_(length), max_len_(max_len), states_(num_states),
        data_(length * max_len * num_states, kLogZero) {}

  double& at(std::size_t start, std::size_t len, std::size_t state) {
    return data_[(start * max_len_ + (len - 1)) * states_ + state];
  }
  double at(std::size_t start, std::size_t len, std::size_t state) const {
    return data_[(start * max_len_ + (len - 1)) * states_ + state];
  }

  std::size_t length() const { return length_; }
  std::size_t max_len() const { return max_len_; }
  std::size_t num_states() const { return states_; }

 private:
  std::size_t length_ = 0, max_len_ = 0, states_ = 0;
  std::vector<double> data_;
};

/// Log initial and transition factors, one table per context. The context of a
/// transition is the one attached to the position where the next segment starts.
class ContextTransitions {
 public:
  ContextTransitions() = default;
  ContextTransitions(std::size_t num_states, std::size_t num_contexts)
      : states_(num_states), contexts_(num_contexts),
        initial_(num_contexts * num_states, kLogZero),
        trans_(num_contexts * num_states * num_states, kLogZero) {}

  double& initial(std::size_t ctx, std::size_t s) { return initial_[ctx * states_ + s]; }
  double initial(std::size_t ctx, std::size_t s) const { return initial_[ctx * states_ + s]; }
  double& trans(std::size_t ctx, std::size_t prev, std::size_t next) {
    return trans_[(ctx * states_ + prev) * states_ + next];
  }
  double trans(std::size_t ctx, std::size_t prev, std::size_t next) const {
    return trans_[(ctx * states_ + prev) * states_ + next];
  }

  std::size_t num_states() const { return states_; }
  std::size_t num_contexts() const { return contexts_; }

 private:
  std::size_t states_ = 0, contexts_ = 0;
  std::vector<double> initial_, trans_;
};

/// alpha(t, k, s): log mass of all paths whose last segment has length k,
/// ends at position t (exclusive) and carries state s.
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::size_t length, std::size_t max_len, std::size_t num_states)
      : length_(length), max_len_(max_len), states_(num_states),
        alpha_((length + 1) * max_len * num_states, kLogZero) {}

  double& alpha(std::size_t t, std::size_t k, std::size_t s) {
    return alpha_[(t * max_len_ + (k - 1)) * states_ + s];
  }
  double alpha(std::size_t t, std::size_t k, std::size_t s) const {
    return alpha_[(t * max_len_ + (k - 1)) * states_ + s];
  }
  /// All (k, s) entries ending at t, k-major.
  std::span<const double> column(std::size_t t) const {
    return std::span<const double>(alpha_).subspan(t * max_len_ * states_, max_len_ * states_);
  }

  /// log of the total mass over every complete path.
  double log_total() const { return log_sum_exp(column(length_)); }

  std::size_t length() const { return length_; }
  std::size_t max_len() const { return max_len_; }
  std::size_t num_states() const { return states_; }

 private:
  std::size_t length_ = 0, max_len_ = 0, states_ = 0;
  std::vector<double> alpha_;
};

struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  int state = 0;
};

/// `log_duration[k-1]` is the log duration factor of length k; `context[i]` is the
/// context id used for transitions into a segment starting at position i.
/// Throws NumericError when no complete path carries mass.
Lattice forward_filter(const SegmentScoreTable& scores, std::span<const double> log_duration,
                       const ContextTransitions& trans, std::span<const std::size_t> context);

/// Draws one path from the posterior encoded by `lattice`. The transition factors
/// and contexts must be those used to fill it.
std::vector<Segment> backward_sample(const Lattice& lattice, const ContextTransitions& trans,
                                     std::span<const std::size_t> context, Rng& rng);

/// Log score of a fixed path under the same factors the lattice uses.
double path_log_score(const std::vector<Segment>& path, const SegmentScoreTable& scores,
                      std::span<const double> log_duration, const ContextTransitions& trans,
                      std::span<const std::size_t> context);

}  // namespace gphsmm::hsmm
