#include "gphsmm/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gphsmm/errors.hpp"

namespace gphsmm::hsmm {

namespace {

void check_shapes(const SegmentScoreTable& scores, std::span<const double> log_duration,
                  const ContextTransitions& trans, std::span<const std::size_t> context) {
  if (scores.length() == 0) throw std::invalid_argument("forward_filter: empty sequence");
  if (log_duration.size() < scores.max_len())
    throw std::invalid_argument("forward_filter: duration table shorter than max length");
  if (trans.num_states() != scores.num_states())
    throw std::invalid_argument("forward_filter: state count mismatch");
  if (context.size() != scores.length())
    throw std::invalid_argument("forward_filter: one context per position required");
  for (std::size_t c : context)
    if (c >= trans.num_contexts()) throw std::invalid_argument("forward_filter: bad context id");
}

}  // namespace

Lattice forward_filter(const SegmentScoreTable& scores, std::span<const double> log_duration,
                       const ContextTransitions& trans, std::span<const std::size_t> context) {
  check_shapes(scores, log_duration, trans, context);
  const std::size_t n = scores.length();
  const std::size_t max_len = scores.max_len();
  const std::size_t states = scores.num_states();
  Lattice lat(n, max_len, states);

  // entry[s][c]: log mass of entering state c at position s. Position 0 uses the
  // initial factors; later positions sum over every path ending at s.
  std::vector<double> entry(n * states, kLogZero);
  std::vector<double> ending(states);
  std::vector<double> terms(states);
  for (std::size_t c = 0; c < states; ++c) entry[c] = trans.initial(context[0], c);

  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t kmax = std::min(max_len, t);
    for (std::size_t k = 1; k <= kmax; ++k) {
      const std::size_t s = t - k;
      for (std::size_t c = 0; c < states; ++c) {
        const double v = scores.at(s, k, c) + log_duration[k - 1] + entry[s * states + c];
        lat.alpha(t, k, c) = v;
      }
    }
    if (t == n) break;

    for (std::size_t prev = 0; prev < states; ++prev) {
      double acc = kLogZero;
      for (std::size_t k = 1; k <= kmax; ++k) acc = log_sum_exp(acc, lat.alpha(t, k, prev));
      ending[prev] = acc;
    }
    const std::size_t ctx = context[t];
    for (std::size_t c = 0; c < states; ++c) {
      for (std::size_t prev = 0; prev < states; ++prev)
        terms[prev] = ending[prev] + trans.trans(ctx, prev, c);
      entry[t * states + c] = log_sum_exp(terms);
    }
  }
  if (lat.log_total() == kLogZero)
    throw NumericError("no feasible segmentation ends at position " + std::to_string(n));
  return lat;
}

std::vector<Segment> backward_sample(const Lattice& lattice, const ContextTransitions& trans,
                                     std::span<const std::size_t> context, Rng& rng) {
  const std::size_t states = lattice.num_states();
  const std::size_t max_len = lattice.max_len();
  std::vector<Segment> path;
  std::vector<double> weights(max_len * states);
  std::size_t t = lattice.length();
  int next = -1;
  while (t > 0) {
    std::fill(weights.begin(), weights.end(), kLogZero);
    const std::size_t kmax = std::min(max_len, t);
    for (std::size_t k = 1; k <= kmax; ++k) {
      for (std::size_t c = 0; c < states; ++c) {
        double w = lattice.alpha(t, k, c);
        if (next >= 0) w += trans.trans(context[t], c, static_cast<std::size_t>(next));
        weights[(k - 1) * states + c] = w;
      }
    }
    const std::size_t pick = rng.sample_log(weights);
    const std::size_t k = pick / states + 1;
    const int c = static_cast<int>(pick % states);
    path.push_back({t - k, t, c});
    next = c;
    t -= k;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double path_log_score(const std::vector<Segment>& path, const SegmentScoreTable& scores,
                      std::span<const double> log_duration, const ContextTransitions& trans,
                      std::span<const std::size_t> context) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& seg = path[i];
    const std::size_t k = seg.end - seg.start;
    const auto c = static_cast<std::size_t>(seg.state);
    total += scores.at(seg.start, k, c) + log_duration[k - 1];
    total += i == 0 ? trans.initial(context[seg.start], c)
                    : trans.trans(context[seg.start], static_cast<std::size_t>(path[i - 1].state), c);
  }
  return total;
}

}  // namespace gphsmm::hsmm
