#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "gphsmm/lower.hpp"
#include "gphsmm/types.hpp"

namespace gphsmm {

/// Sufficient statistics of the unit layer, shared by all three emission
/// formulations and by the element prior sent down to the lower layer.
///
/// Positional tables are kept per unit class; the word-segmentation prior sums
/// them over units.
class EmissionCounts {
 public:
  EmissionCounts(std::size_t num_elements, std::size_t num_units);

  /// `elements` is one sequence's element class string, `units` tiles it.
  void add(std::span<const int> elements, const UnitSegmentation& units) { update(elements, units, 1.0); }
  void remove(std::span<const int> elements, const UnitSegmentation& units) { update(elements, units, -1.0); }
  void clear();

  std::size_t num_elements() const { return elements_; }
  std::size_t num_units() const { return units_; }

  // word segmentation
  double string_count(std::span<const int> sub) const;
  double total_units() const { return n_all_; }
  /// Distinct unit strings observed, plus one slot for unseen strings.
  std::size_t vocabulary() const { return strings_.size() + 1; }
  const std::map<std::vector<int>, double>& strings() const { return strings_; }

  // element unigram: N_{b,c}, N_b
  double unit_element(std::size_t b, std::size_t c) const { return unigram_[b * elements_ + c]; }
  double unit_total(std::size_t b) const { return unit_total_[b]; }

  // element bigram: N_{b,prev,c}, N_{b,prev} = sum over c of N_{b,prev,c}
  double bigram(std::size_t b, std::size_t prev, std::size_t c) const {
    return bigram_[(b * elements_ + prev) * elements_ + c];
  }
  double bigram_context(std::size_t b, std::size_t prev) const { return bigram_ctx_[b * elements_ + prev]; }

  // positions inside units
  double count_begin(std::size_t c, std::size_t b) const { return begin_[b * elements_ + c]; }
  double count_end(std::size_t c, std::size_t b) const { return end_[b * elements_ + c]; }
  double count_trans(std::size_t prev, std::size_t c, std::size_t b) const { return bigram(b, prev, c); }
  double begin_total(std::size_t b) const { return begin_total_[b]; }

  friend bool operator==(const EmissionCounts&, const EmissionCounts&) = default;

 private:
  void update(std::span<const int> elements, const UnitSegmentation& units, double sign);

  std::size_t elements_, units_;
  std::map<std::vector<int>, double> strings_;
  double n_all_ = 0.0;
  std::vector<double> unigram_, unit_total_;
  std::vector<double> bigram_, bigram_ctx_;
  std::vector<double> begin_, end_, begin_total_;
};

/// Rebuilds every table from scratch. Throws DataError if a unit segmentation
/// does not tile its element sequence.
EmissionCounts update_counts(std::size_t num_elements, std::size_t num_units,
                             std::span<const std::vector<int>> elements,
                             std::span<const UnitSegmentation> units);

/// (N_sub + alpha) / (N_all + alpha V)
double ws_emission(std::span<const int> sub, const EmissionCounts& counts, double alpha);
/// prod_t (N_{b,c_t} + alpha) / (N_b + alpha C)
double meu_emission(std::span<const int> sub, std::size_t b, const EmissionCounts& counts, double alpha);
/// Begin factor (count_begin(c_1,b) + alpha) / (sum_c count_begin(c,b) + alpha C) times
/// prod_{t>=2} (N_{b,c_{t-1},c_t} + alpha) / (N_{b,c_{t-1}} + alpha C).
double meb_emission(std::span<const int> sub, std::size_t b, const EmissionCounts& counts, double alpha);

double log_emission(EmissionMode mode, std::span<const int> sub, std::size_t b,
                    const EmissionCounts& counts, double alpha);

/// Mu-smoothed positional multinomials over element classes: begin, middle (after
/// the preceding element) and end, where the end case multiplies the transition and
/// end counts before normalizing. Word segmentation pools the tables over units.
ElementPrior element_prior(const EmissionCounts& counts, EmissionMode mode, double mu);

}  // namespace gphsmm
