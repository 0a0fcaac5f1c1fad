#include "gphsmm/upper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gphsmm/errors.hpp"

namespace gphsmm {

EmissionModel::EmissionModel(EmissionMode mode, const EmissionCounts& counts, double alpha)
    : mode_(mode), counts_(counts), alpha_(alpha) {
  if (mode == EmissionMode::LowerOnly)
    throw std::invalid_argument("EmissionModel: lower-only mode has no emissions");
}

hsmm::SegmentScoreTable score_units(std::span<const int> elements, const EmissionModel& em,
                                    std::size_t max_len) {
  const std::size_t n = elements.size();
  const std::size_t units = em.num_units();
  hsmm::SegmentScoreTable scores(n, max_len, units);
  const bool shared = em.mode() == EmissionMode::WordSegmentation;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t kmax = std::min(max_len, n - s);
    for (std::size_t k = 1; k <= kmax; ++k) {
      const auto sub = elements.subspan(s, k);
      if (shared) {
        const double v = em.log_prob(sub, 0);
        for (std::size_t b = 0; b < units; ++b) scores.at(s, k, b) = v;
      } else {
        for (std::size_t b = 0; b < units; ++b) scores.at(s, k, b) = em.log_prob(sub, b);
      }
    }
  }
  return scores;
}

hsmm::ContextTransitions unit_transitions(const UnitTransitionTable& trans) {
  const std::size_t n = trans.num_states();
  hsmm::ContextTransitions out(n, 1);
  for (std::size_t b = 0; b < n; ++b) {
    out.initial(0, b) = std::log(trans.initial(b));
    for (std::size_t next = 0; next < n; ++next) out.trans(0, b, next) = std::log(trans.trans(b, next));
  }
  return out;
}

UnitForwardLattice unit_forward_filter(std::span<const int> elements, const EmissionModel& em,
                                       const UnitTransitionTable& trans, const DurationModel& dur) {
  const std::vector<std::size_t> context(elements.size(), 0);
  return hsmm::forward_filter(score_units(elements, em, dur.max_len()), dur.log_table(),
                              unit_transitions(trans), context);
}

UnitSegmentation unit_backward_sample(const UnitForwardLattice& lattice,
                                      const UnitTransitionTable& trans, Rng& rng,
                                      std::string series_id) {
  const std::vector<std::size_t> context(lattice.length(), 0);
  const auto path = hsmm::backward_sample(lattice, unit_transitions(trans), context, rng);
  UnitSegmentation seg{std::move(series_id), {}};
  for (const auto& p : path) seg.segments.push_back({p.start, p.end, p.state});
  return seg;
}

UpperLayer::UpperLayer(std::size_t num_sequences, const Hyperparams& h, EmissionMode mode)
    : mode_(mode), alpha_(h.alpha), max_len_(static_cast<std::size_t>(h.max_unit_len)),
      counts_(static_cast<std::size_t>(h.num_element_classes),
              static_cast<std::size_t>(h.num_unit_classes)),
      trans_(static_cast<std::size_t>(h.num_unit_classes), h.transition_smoothing),
      dur_(h.unit_duration_mean(), static_cast<std::size_t>(h.max_unit_len)),
      elements_(num_sequences), units_(num_sequences) {
  if (mode == EmissionMode::LowerOnly)
    throw std::invalid_argument("UpperLayer: lower-only mode has no upper layer");
}

std::vector<int> UpperLayer::unit_classes(const UnitSegmentation& u) {
  std::vector<int> out;
  for (const auto& s : u.segments) out.push_back(s.class_id);
  return out;
}

void UpperLayer::resample_unit_sequence(std::size_t i, std::span<const int> elements,
                                        const std::string& series_id, Rng& rng) {
  if (elements.empty()) throw DataError("sequence '" + series_id + "' has no elements");
  if (assigned(i)) {
    counts_.remove(elements_[i], units_[i]);
    trans_.remove(unit_classes(units_[i]));
  }
  try {
    const EmissionModel em(mode_, counts_, alpha_);
    const auto lattice = unit_forward_filter(elements, em, trans_, dur_);
    units_[i] = unit_backward_sample(lattice, trans_, rng, series_id);
  } catch (const NumericError& e) {
    throw NumericError("sequence '" + series_id + "' (units): " + e.what());
  }
  elements_[i].assign(elements.begin(), elements.end());
  counts_.add(elements_[i], units_[i]);
  trans_.add(unit_classes(units_[i]));
}

double UpperLayer::sequence_log_score(std::size_t i) const {
  const auto& elems = elements_[i];
  const std::span<const int> view(elems);
  double total = 0.0;
  int prev = -1;
  for (const auto& u : units_[i].segments) {
    const auto b = static_cast<std::size_t>(u.class_id);
    total += log_emission(mode_, view.subspan(u.start, u.length()), b, counts_, alpha_);
    total += dur_.log_pmf(u.length());
    total += std::log(prev < 0 ? trans_.initial(b) : trans_.trans(static_cast<std::size_t>(prev), b));
    prev = u.class_id;
  }
  return total;
}

}  // namespace gphsmm
