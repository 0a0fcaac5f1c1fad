#include "gphsmm/emission.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gphsmm/errors.hpp"

namespace gphsmm {

EmissionCounts::EmissionCounts(std::size_t num_elements, std::size_t num_units)
    : elements_(num_elements), units_(num_units) {
  if (num_elements == 0 || num_units == 0)
    throw std::invalid_argument("EmissionCounts: class counts must be >= 1");
  clear();
}

void EmissionCounts::clear() {
  const std::size_t c = elements_, b = units_;
  strings_.clear();
  n_all_ = 0.0;
  unigram_.assign(b * c, 0.0);
  unit_total_.assign(b, 0.0);
  bigram_.assign(b * c * c, 0.0);
  bigram_ctx_.assign(b * c, 0.0);
  begin_.assign(b * c, 0.0);
  end_.assign(b * c, 0.0);
  begin_total_.assign(b, 0.0);
}

void EmissionCounts::update(std::span<const int> elements, const UnitSegmentation& units,
                            double sign) {
  check_tiling(units, elements.size(), std::numeric_limits<std::size_t>::max());
  for (int e : elements)
    if (e < 0 || static_cast<std::size_t>(e) >= elements_)
      throw DataError("element class out of range in emission update");
  for (const auto& u : units.segments) {
    if (static_cast<std::size_t>(u.class_id) >= units_)
      throw DataError("unit class out of range in emission update");
    const auto b = static_cast<std::size_t>(u.class_id);
    const auto sub = elements.subspan(u.start, u.length());

    std::vector<int> key(sub.begin(), sub.end());
    double& n = strings_[key];
    n += sign;
    if (n <= 0.0) strings_.erase(key);
    n_all_ += sign;

    for (std::size_t t = 0; t < sub.size(); ++t) {
      const auto c = static_cast<std::size_t>(sub[t]);
      unigram_[b * elements_ + c] += sign;
      if (t > 0) {
        const auto prev = static_cast<std::size_t>(sub[t - 1]);
        bigram_[(b * elements_ + prev) * elements_ + c] += sign;
        bigram_ctx_[b * elements_ + prev] += sign;
      }
    }
    unit_total_[b] += sign * static_cast<double>(sub.size());
    begin_[b * elements_ + static_cast<std::size_t>(sub.front())] += sign;
    end_[b * elements_ + static_cast<std::size_t>(sub.back())] += sign;
    begin_total_[b] += sign;
  }
}

double EmissionCounts::string_count(std::span<const int> sub) const {
  const auto it = strings_.find(std::vector<int>(sub.begin(), sub.end()));
  return it == strings_.end() ? 0.0 : it->second;
}

EmissionCounts update_counts(std::size_t num_elements, std::size_t num_units,
                             std::span<const std::vector<int>> elements,
                             std::span<const UnitSegmentation> units) {
  if (elements.size() != units.size())
    throw DataError("update_counts: element and unit corpora differ in size");
  EmissionCounts counts(num_elements, num_units);
  for (std::size_t i = 0; i < elements.size(); ++i) counts.add(elements[i], units[i]);
  return counts;
}

double ws_emission(std::span<const int> sub, const EmissionCounts& counts, double alpha) {
  return (counts.string_count(sub) + alpha) /
         (counts.total_units() + alpha * static_cast<double>(counts.vocabulary()));
}

double meu_emission(std::span<const int> sub, std::size_t b, const EmissionCounts& counts,
                    double alpha) {
  const double denom = counts.unit_total(b) + alpha * static_cast<double>(counts.num_elements());
  double p = 1.0;
  for (int c : sub) p *= (counts.unit_element(b, static_cast<std::size_t>(c)) + alpha) / denom;
  return p;
}

double meb_emission(std::span<const int> sub, std::size_t b, const EmissionCounts& counts,
                    double alpha) {
  if (sub.empty()) throw std::invalid_argument("meb_emission: empty subsequence");
  const double cc = static_cast<double>(counts.num_elements());
  double p = (counts.count_begin(static_cast<std::size_t>(sub[0]), b) + alpha) /
             (counts.begin_total(b) + alpha * cc);
  for (std::size_t t = 1; t < sub.size(); ++t) {
    const auto prev = static_cast<std::size_t>(sub[t - 1]);
    const auto c = static_cast<std::size_t>(sub[t]);
    p *= (counts.bigram(b, prev, c) + alpha) / (counts.bigram_context(b, prev) + alpha * cc);
  }
  return p;
}

double log_emission(EmissionMode mode, std::span<const int> sub, std::size_t b,
                    const EmissionCounts& counts, double alpha) {
  switch (mode) {
    case EmissionMode::WordSegmentation: return std::log(ws_emission(sub, counts, alpha));
    case EmissionMode::MotionUnigram: return std::log(meu_emission(sub, b, counts, alpha));
    case EmissionMode::MotionBigram: return std::log(meb_emission(sub, b, counts, alpha));
    case EmissionMode::LowerOnly: break;
  }
  throw std::invalid_argument("log_emission: the lower-only mode has no unit emissions");
}

ElementPrior element_prior(const EmissionCounts& counts, EmissionMode mode, double mu) {
  const std::size_t nc = counts.num_elements();
  const std::size_t nb = counts.num_units();
  const bool pooled = mode == EmissionMode::WordSegmentation;

  auto begin_count = [&](std::size_t c, std::size_t b) {
    if (!pooled) return counts.count_begin(c, b);
    double s = 0.0;
    for (std::size_t u = 0; u < nb; ++u) s += counts.count_begin(c, u);
    return s;
  };
  auto end_count = [&](std::size_t c, std::size_t b) {
    if (!pooled) return counts.count_end(c, b);
    double s = 0.0;
    for (std::size_t u = 0; u < nb; ++u) s += counts.count_end(c, u);
    return s;
  };
  auto trans_count = [&](std::size_t prev, std::size_t c, std::size_t b) {
    if (!pooled) return counts.count_trans(prev, c, b);
    double s = 0.0;
    for (std::size_t u = 0; u < nb; ++u) s += counts.count_trans(prev, c, u);
    return s;
  };

  std::vector<double> begin(nb * nc), middle(nb * nc * nc), end(nb * nc * nc);
  auto normalize = [nc](double* row) {
    double total = 0.0;
    for (std::size_t c = 0; c < nc; ++c) total += row[c];
    for (std::size_t c = 0; c < nc; ++c) row[c] /= total;
  };
  for (std::size_t b = 0; b < nb; ++b) {
    double* brow = &begin[b * nc];
    for (std::size_t c = 0; c < nc; ++c) brow[c] = begin_count(c, b) + mu;
    normalize(brow);
    for (std::size_t prev = 0; prev < nc; ++prev) {
      double* mrow = &middle[(b * nc + prev) * nc];
      double* erow = &end[(b * nc + prev) * nc];
      for (std::size_t c = 0; c < nc; ++c) {
        const double tr = trans_count(prev, c, b) + mu;
        mrow[c] = tr;
        erow[c] = tr * (end_count(c, b) + mu);
      }
      normalize(mrow);
      normalize(erow);
    }
  }
  return ElementPrior(nc, nb, std::move(begin), std::move(middle), std::move(end));
}

}  // namespace gphsmm
