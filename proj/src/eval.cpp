#include "gphsmm/eval.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include "gphsmm/errors.hpp"

namespace gphsmm {

std::size_t levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double nld(std::span<const int> a, std::span<const int> b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

namespace {

using Overlap = std::map<int, std::map<int, std::size_t>>;

Overlap overlaps(std::span<const std::vector<LabeledSpan>> estimated,
                 std::span<const std::vector<LabeledSpan>> truth) {
  if (estimated.size() != truth.size())
    throw DataError("estimated and truth corpora differ in sequence count");
  Overlap out;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const auto& est = estimated[i];
    const auto& tru = truth[i];
    std::size_t j = 0;
    for (const auto& e : est) {
      out[e.label];  // classes with no overlap still get an entry
      while (j < tru.size() && tru[j].end <= e.start) ++j;
      for (std::size_t k = j; k < tru.size() && tru[k].start < e.end; ++k) {
        const std::size_t lo = std::max(e.start, tru[k].start);
        const std::size_t hi = std::min(e.end, tru[k].end);
        if (hi > lo) out[e.label][tru[k].label] += hi - lo;
      }
    }
  }
  return out;
}

// Minimum-cost perfect assignment on a square matrix (rows to columns).
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Label that never equals a truth label (truth labels are non-negative).
int unmatched_label(int est_class) { return -1 - est_class; }

}  // namespace

std::map<int, int> class_mapping(std::span<const std::vector<LabeledSpan>> estimated,
                                 std::span<const std::vector<LabeledSpan>> truth,
                                 MappingKind kind) {
  const Overlap ov = overlaps(estimated, truth);
  std::map<int, int> mapping;
  if (kind == MappingKind::Greedy) {
    for (const auto& [est, row] : ov) {
      int best = unmatched_label(est);
      std::size_t best_count = 0;
      for (const auto& [label, count] : row) {
        if (count > best_count) {  // ties keep the smaller label
          best = label;
          best_count = count;
        }
      }
      mapping[est] = best;
    }
    return mapping;
  }

  std::set<int> truth_labels;
  for (const auto& seq : truth)
    for (const auto& s : seq) truth_labels.insert(s.label);
  const std::vector<int> cols(truth_labels.begin(), truth_labels.end());
  std::vector<int> rows;
  for (const auto& [est, row] : ov) rows.push_back(est);
  const std::size_t n = std::max(rows.size(), cols.size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = ov.at(rows[i]);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto it = row.find(cols[j]);
      cost[i][j] = it == row.end() ? 0.0 : -static_cast<double>(it->second);
    }
  }
  const auto assign = hungarian(cost);
  for (std::size_t i = 0; i < rows.size(); ++i)
    mapping[rows[i]] = assign[i] < cols.size() ? cols[assign[i]] : unmatched_label(rows[i]);
  return mapping;
}

LabelSequence map_classes(std::span<const LabeledSpan> estimated, const std::map<int, int>& mapping) {
  LabelSequence out;
  out.reserve(estimated.size());
  for (const auto& s : estimated) {
    const auto it = mapping.find(s.label);
    out.push_back(it == mapping.end() ? unmatched_label(s.label) : it->second);
  }
  return out;
}

std::vector<LabeledSpan> element_spans(const ElementSegmentation& seg) {
  std::vector<LabeledSpan> out;
  out.reserve(seg.segments.size());
  for (const auto& s : seg.segments) out.push_back({s.start, s.end, s.class_id});
  return out;
}

int StringTypes::id(std::span<const int> elements) {
  const auto [it, inserted] =
      ids_.try_emplace(std::vector<int>(elements.begin(), elements.end()), static_cast<int>(ids_.size()));
  return it->second;
}

std::vector<LabeledSpan> unit_spans(const ElementSegmentation& elements,
                                    const UnitSegmentation& units, StringTypes* types) {
  const auto classes = elements.classes();
  std::vector<LabeledSpan> out;
  for (const auto& u : units.segments) {
    if (u.end > elements.segments.size() || u.start >= u.end)
      throw DataError("unit segmentation of '" + units.series_id + "' does not fit its elements");
    const int label = types ? types->id(std::span<const int>(classes).subspan(u.start, u.length()))
                            : u.class_id;
    out.push_back({elements.segments[u.start].start, elements.segments[u.end - 1].end, label});
  }
  return out;
}

CorpusScore score_segments(std::span<const std::vector<LabeledSpan>> estimated,
                           std::span<const std::vector<LabeledSpan>> truth, MappingKind kind) {
  const auto mapping = class_mapping(estimated, truth, kind);
  CorpusScore score;
  std::set<int> used;
  double total = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const auto est = map_classes(estimated[i], mapping);
    LabelSequence tru;
    for (const auto& s : truth[i]) tru.push_back(s.label);
    for (const auto& s : estimated[i]) used.insert(s.label);
    const double d = nld(est, tru);
    score.per_sequence.push_back(d);
    total += d;
  }
  score.mean_nld = estimated.empty() ? 0.0 : total / static_cast<double>(estimated.size());
  score.distinct_labels = used.size();
  return score;
}

CorpusScore score_elements(std::span<const ElementSegmentation> estimated,
                           std::span<const ElementSegmentation> truth, MappingKind kind) {
  std::vector<std::vector<LabeledSpan>> est, tru;
  for (const auto& s : estimated) est.push_back(element_spans(s));
  for (const auto& s : truth) tru.push_back(element_spans(s));
  return score_segments(est, tru, kind);
}

CorpusScore score_units(std::span<const ElementSegmentation> est_elements,
                        std::span<const UnitSegmentation> est_units,
                        std::span<const ElementSegmentation> truth_elements,
                        std::span<const UnitSegmentation> truth_units, bool string_labels,
                        MappingKind kind) {
  if (est_elements.size() != est_units.size() || truth_elements.size() != truth_units.size())
    throw DataError("element and unit segmentations differ in sequence count");
  StringTypes types;
  std::vector<std::vector<LabeledSpan>> est, tru;
  for (std::size_t i = 0; i < est_elements.size(); ++i)
    est.push_back(unit_spans(est_elements[i], est_units[i], string_labels ? &types : nullptr));
  for (std::size_t i = 0; i < truth_elements.size(); ++i)
    tru.push_back(unit_spans(truth_elements[i], truth_units[i]));
  return score_segments(est, tru, kind);
}

}  // namespace gphsmm
