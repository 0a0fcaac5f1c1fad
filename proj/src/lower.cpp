#include "gphsmm/lower.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gphsmm/errors.hpp"
#include "gphsmm/log_math.hpp"

namespace gphsmm {

DurationModel::DurationModel(double lambda, std::size_t max_len) : lambda_(lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("DurationModel: lambda must be > 0");
  if (max_len == 0) throw std::invalid_argument("DurationModel: max_len must be >= 1");
  log_pmf_.resize(max_len);
  for (std::size_t k = 1; k <= max_len; ++k) {
    const double kk = static_cast<double>(k);
    log_pmf_[k - 1] = kk * std::log(lambda) - lambda - std::lgamma(kk + 1.0);
  }
  const double norm = log_sum_exp(log_pmf_);
  for (double& v : log_pmf_) v -= norm;
}

double DurationModel::log_pmf(std::size_t k) const {
  if (k < 1 || k > log_pmf_.size()) throw std::out_of_range("DurationModel: length out of range");
  return log_pmf_[k - 1];
}

TransitionTable::TransitionTable(std::size_t num_states, double smoothing)
    : states_(num_states), smoothing_(smoothing), initial_(num_states, 0.0),
      pairs_(num_states * num_states, 0.0), rows_(num_states, 0.0) {
  if (num_states == 0) throw std::invalid_argument("TransitionTable: no states");
  if (!(smoothing > 0.0)) throw std::invalid_argument("TransitionTable: smoothing must be > 0");
}

void TransitionTable::update(std::span<const int> states, double sign) {
  if (states.empty()) return;
  for (int s : states)
    if (s < 0 || static_cast<std::size_t>(s) >= states_)
      throw std::out_of_range("TransitionTable: state out of range");
  initial_[states[0]] += sign;
  starts_ += sign;
  for (std::size_t i = 1; i < states.size(); ++i) {
    pairs_[states[i - 1] * states_ + states[i]] += sign;
    rows_[states[i - 1]] += sign;
  }
}

void TransitionTable::clear() {
  std::fill(initial_.begin(), initial_.end(), 0.0);
  std::fill(pairs_.begin(), pairs_.end(), 0.0);
  std::fill(rows_.begin(), rows_.end(), 0.0);
  starts_ = 0.0;
}

double TransitionTable::initial(std::size_t s) const {
  return (initial_[s] + smoothing_) / (starts_ + smoothing_ * static_cast<double>(states_));
}

double TransitionTable::trans(std::size_t prev, std::size_t next) const {
  return (pairs_[prev * states_ + next] + smoothing_) /
         (rows_[prev] + smoothing_ * static_cast<double>(states_));
}

double TransitionTable::total_transitions() const {
  double total = 0.0;
  for (double r : rows_) total += r;
  return total;
}

ElementPrior::ElementPrior(std::size_t num_elements, std::size_t num_units)
    : elements_(num_elements), units_(num_units) {}

ElementPrior ElementPrior::uniform(std::size_t num_elements, std::size_t num_units) {
  ElementPrior p(num_elements, num_units);
  const double u = 1.0 / static_cast<double>(num_elements);
  p.begin_.assign(num_units * num_elements, u);
  p.middle_.assign(num_units * num_elements * num_elements, u);
  p.end_ = p.middle_;
  return p;
}

ElementPrior::ElementPrior(std::size_t num_elements, std::size_t num_units,
                           std::vector<double> begin, std::vector<double> middle,
                           std::vector<double> end)
    : elements_(num_elements), units_(num_units), uniform_(false), begin_(std::move(begin)),
      middle_(std::move(middle)), end_(std::move(end)) {
  const std::size_t c = num_elements, b = num_units;
  if (begin_.size() != b * c || middle_.size() != b * c * c || end_.size() != b * c * c)
    throw std::invalid_argument("ElementPrior: table shape mismatch");
}

double ElementPrior::prob(std::size_t c, std::size_t b, UnitPosition pos, int prev) const {
  if (prev < 0 || pos == UnitPosition::Begin) return begin_[b * elements_ + c];
  const std::size_t row = (b * elements_ + static_cast<std::size_t>(prev)) * elements_;
  return pos == UnitPosition::Middle ? middle_[row + c] : end_[row + c];
}

std::size_t prior_context_id(std::size_t unit_class, UnitPosition pos) {
  return 1 + 3 * unit_class + static_cast<std::size_t>(pos);
}

std::size_t num_prior_contexts(std::size_t num_units) { return 1 + 3 * num_units; }

std::vector<std::size_t> unit_context(const ElementSegmentation& elements,
                                      const UnitSegmentation& units, std::size_t length,
                                      std::size_t num_units) {
  std::vector<std::size_t> ctx(length, 0);
  if (units.segments.empty()) return ctx;
  for (const auto& u : units.segments) {
    if (u.end > elements.segments.size())
      throw std::invalid_argument("unit_context: unit spans past the element sequence");
    if (u.class_id < 0 || static_cast<std::size_t>(u.class_id) >= num_units)
      throw std::invalid_argument("unit_context: unit class out of range");
    for (std::size_t j = u.start; j < u.end; ++j) {
      const UnitPosition pos = j == u.start        ? UnitPosition::Begin
                               : j + 1 == u.end    ? UnitPosition::End
                                                   : UnitPosition::Middle;
      const std::size_t id = prior_context_id(static_cast<std::size_t>(u.class_id), pos);
      const auto& e = elements.segments[j];
      for (std::size_t t = e.start; t < std::min(e.end, length); ++t) ctx[t] = id;
    }
  }
  return ctx;
}

hsmm::ContextTransitions lower_transitions(const TransitionTable& trans, const ElementPrior& prior) {
  const std::size_t states = trans.num_states();
  if (prior.num_elements() != states)
    throw std::invalid_argument("lower_transitions: prior/class count mismatch");
  const std::size_t units = prior.num_units();
  hsmm::ContextTransitions out(states, num_prior_contexts(units));

  std::vector<double> row(states);
  auto fill_row = [&](auto&& weight, auto&& store) {
    double total = 0.0;
    for (std::size_t c = 0; c < states; ++c) total += row[c] = weight(c);
    for (std::size_t c = 0; c < states; ++c) store(c, std::log(row[c] / total));
  };

  // context 0: no unit information, the transition model alone
  fill_row([&](std::size_t c) { return trans.initial(c); },
           [&](std::size_t c, double v) { out.initial(0, c) = v; });
  for (std::size_t prev = 0; prev < states; ++prev)
    fill_row([&](std::size_t c) { return trans.trans(prev, c); },
             [&](std::size_t c, double v) { out.trans(0, prev, c) = v; });

  for (std::size_t b = 0; b < units; ++b) {
    for (UnitPosition pos : {UnitPosition::Begin, UnitPosition::Middle, UnitPosition::End}) {
      const std::size_t ctx = prior_context_id(b, pos);
      if (prior.is_uniform()) {
        for (std::size_t c = 0; c < states; ++c) out.initial(ctx, c) = out.initial(0, c);
        for (std::size_t prev = 0; prev < states; ++prev)
          for (std::size_t c = 0; c < states; ++c) out.trans(ctx, prev, c) = out.trans(0, prev, c);
        continue;
      }
      fill_row([&](std::size_t c) { return trans.initial(c) * prior.prob(c, b, pos, -1); },
               [&](std::size_t c, double v) { out.initial(ctx, c) = v; });
      for (std::size_t prev = 0; prev < states; ++prev) {
        fill_row(
            [&](std::size_t c) {
              return trans.trans(prev, c) * prior.prob(c, b, pos, static_cast<int>(prev));
            },
            [&](std::size_t c, double v) { out.trans(ctx, prev, c) = v; });
      }
    }
  }
  return out;
}

hsmm::SegmentScoreTable score_segments(const TimeSeries& series,
                                       std::span<const GpClassModel> gps, std::size_t max_len) {
  const std::size_t n = series.length();
  hsmm::SegmentScoreTable scores(n, max_len, gps.size());
  for (std::size_t c = 0; c < gps.size(); ++c) {
    if (gps[c].dim() != series.dim())
      throw std::invalid_argument("score_segments: GP dimension does not match the series");
    const PredictiveTable table = gps[c].predictive_table(max_len);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t kmax = std::min(max_len, n - s);
      double acc = 0.0;
      for (std::size_t k = 1; k <= kmax; ++k) {
        acc += table.sample_loglik(k - 1, series.sample(s + k - 1));
        scores.at(s, k, c) = acc;
      }
    }
  }
  return scores;
}

ForwardLattice forward_filter(const hsmm::SegmentScoreTable& scores, const TransitionTable& trans,
                              const DurationModel& dur, const ElementPrior& prior,
                              std::span<const std::size_t> context) {
  if (dur.max_len() != scores.max_len())
    throw std::invalid_argument("forward_filter: duration support differs from max length");
  return hsmm::forward_filter(scores, dur.log_table(), lower_transitions(trans, prior), context);
}

ForwardLattice forward_filter(const TimeSeries& series, std::span<const GpClassModel> gps,
                              const TransitionTable& trans, const DurationModel& dur,
                              const ElementPrior& prior, std::span<const std::size_t> context) {
  return forward_filter(score_segments(series, gps, dur.max_len()), trans, dur, prior, context);
}

ElementSegmentation backward_sample(const ForwardLattice& lattice, const TransitionTable& trans,
                                    const ElementPrior& prior, std::span<const std::size_t> context,
                                    Rng& rng, std::string series_id) {
  const auto path = hsmm::backward_sample(lattice, lower_transitions(trans, prior), context, rng);
  ElementSegmentation seg{std::move(series_id), {}};
  seg.segments.reserve(path.size());
  for (const auto& p : path) seg.segments.push_back({p.start, p.end, p.state});
  return seg;
}

LowerLayer::LowerLayer(const std::vector<TimeSeries>& corpus, const Hyperparams& h,
                       std::uint64_t gp_seed)
    : corpus_(corpus), max_len_(static_cast<std::size_t>(h.max_element_len)),
      trans_(static_cast<std::size_t>(h.num_element_classes), h.transition_smoothing),
      dur_(h.element_duration_mean(), static_cast<std::size_t>(h.max_element_len)),
      segs_(corpus.size()) {
  if (corpus.empty()) throw DataError("corpus is empty");
  const std::size_t dim = corpus.front().dim();
  for (const auto& s : corpus)
    if (s.dim() != dim) throw DataError("series '" + s.id() + "' has mismatched dimension");
  const Rng root(gp_seed);
  for (int c = 0; c < h.num_element_classes; ++c)
    gps_.emplace_back(dim, h.kernel, static_cast<std::size_t>(h.gp_cap), h.variance_floor,
                      root.split(static_cast<std::uint64_t>(c)).seed());
  for (std::size_t i = 0; i < corpus.size(); ++i) segs_[i].series_id = corpus[i].id();
}

void LowerLayer::initialize_random(Rng& rng) {
  const double mean = dur_.lambda();
  const std::size_t classes = gps_.size();
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    if (assigned(i)) remove(i);
    const std::size_t n = corpus_[i].length();
    ElementSegmentation seg{corpus_[i].id(), {}};
    std::size_t t = 0;
    while (t < n) {
      std::size_t len = 1;
      if (mean > 1.0) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        len = 1 + static_cast<std::size_t>(std::floor(std::log(u) / std::log1p(-1.0 / mean)));
      }
      len = std::clamp<std::size_t>(len, 1, std::min(max_len_, n - t));
      seg.segments.push_back({t, t + len, static_cast<int>(rng.index(classes))});
      t += len;
    }
    segs_[i] = std::move(seg);
    add(i);
  }
}

void LowerLayer::assign(std::size_t i, ElementSegmentation seg) {
  check_tiling(seg, corpus_[i].length(), max_len_);
  for (const auto& s : seg.segments)
    if (static_cast<std::size_t>(s.class_id) >= gps_.size())
      throw DataError("element class out of range in sequence '" + corpus_[i].id() + "'");
  if (assigned(i)) remove(i);
  seg.series_id = corpus_[i].id();
  segs_[i] = std::move(seg);
  add(i);
}

void LowerLayer::add(std::size_t i) {
  const auto& series = corpus_[i];
  for (const auto& s : segs_[i].segments)
    gps_[s.class_id].add_segment(segment_span(series, s.start, s.end));
  trans_.add(segs_[i].classes());
}

void LowerLayer::remove(std::size_t i) {
  const auto& series = corpus_[i];
  for (const auto& s : segs_[i].segments)
    gps_[s.class_id].remove_segment(segment_span(series, s.start, s.end));
  trans_.remove(segs_[i].classes());
}

void LowerLayer::resample_sequence(std::size_t i, const ElementPrior& prior,
                                   std::span<const std::size_t> context, Rng& rng) {
  if (assigned(i)) remove(i);
  const auto& series = corpus_[i];
  ElementSegmentation seg;
  try {
    const auto transitions = lower_transitions(trans_, prior);
    const auto lattice = hsmm::forward_filter(score_segments(series, gps_, max_len_),
                                              dur_.log_table(), transitions, context);
    const auto path = hsmm::backward_sample(lattice, transitions, context, rng);
    seg.series_id = series.id();
    for (const auto& p : path) seg.segments.push_back({p.start, p.end, p.state});
  } catch (const NumericError& e) {
    throw NumericError("sequence '" + series.id() + "': " + e.what());
  }
  segs_[i] = std::move(seg);
  add(i);
}

double LowerLayer::sequence_log_score(std::size_t i, const ElementPrior& prior,
                                      std::span<const std::size_t> context) const {
  const auto& series = corpus_[i];
  const auto transitions = lower_transitions(trans_, prior);
  double total = 0.0;
  int prev = -1;
  for (const auto& s : segs_[i].segments) {
    const auto c = static_cast<std::size_t>(s.class_id);
    total += gps_[c].segment_loglik(segment_span(series, s.start, s.end));
    total += dur_.log_pmf(s.length());
    total += prev < 0 ? transitions.initial(context[s.start], c)
                      : transitions.trans(context[s.start], static_cast<std::size_t>(prev), c);
    prev = s.class_id;
  }
  return total;
}

}  // namespace gphsmm
