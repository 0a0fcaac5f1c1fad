#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "gphsmm/types.hpp"

namespace gphsmm {

/// Minimum number of insertions, deletions and substitutions turning a into b.
std::size_t levenshtein(std::span<const int> a, std::span<const int> b);

/// levenshtein(a, b) / max(|a|, |b|); 0 when both are empty.
double nld(std::span<const int> a, std::span<const int> b);

/// A labelled interval of samples, [start, end).
struct LabeledSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  int label = 0;
};
using LabelSequence = std::vector<int>;

enum class MappingKind {
  Greedy,     // each estimated class takes its majority-overlap truth label
  Hungarian,  // one-to-one assignment maximizing total overlap
};

/// Maps estimated class ids to truth labels using sample overlap accumulated over
/// the corpus. Sequences are paired by index.
std::map<int, int> class_mapping(std::span<const std::vector<LabeledSpan>> estimated,
                                 std::span<const std::vector<LabeledSpan>> truth,
                                 MappingKind kind = MappingKind::Greedy);

/// One label per segment after mapping. Classes absent from `mapping` get a label
/// that matches no truth label.
LabelSequence map_classes(std::span<const LabeledSpan> estimated, const std::map<int, int>& mapping);

std::vector<LabeledSpan> element_spans(const ElementSegmentation& seg);

/// Assigns a corpus-wide id to each distinct element-class string.
class StringTypes {
 public:
  int id(std::span<const int> elements);
  std::size_t size() const { return ids_.size(); }

 private:
  std::map<std::vector<int>, int> ids_;
};

/// Unit spans in sample coordinates. With `types`, a unit's label is the id of its
/// element string instead of its class.
std::vector<LabeledSpan> unit_spans(const ElementSegmentation& elements,
                                    const UnitSegmentation& units, StringTypes* types = nullptr);

struct CorpusScore {
  double mean_nld = 0.0;
  std::vector<double> per_sequence;
  /// Distinct estimated labels used anywhere in the corpus.
  std::size_t distinct_labels = 0;
};

/// Maps classes over the corpus, then averages per-sequence NLD of the segment label strings.
CorpusScore score_segments(std::span<const std::vector<LabeledSpan>> estimated,
                           std::span<const std::vector<LabeledSpan>> truth,
                           MappingKind kind = MappingKind::Greedy);

CorpusScore score_elements(std::span<const ElementSegmentation> estimated,
                           std::span<const ElementSegmentation> truth,
                           MappingKind kind = MappingKind::Greedy);

/// `string_labels` labels estimated units by their element string (word-segmentation runs).
CorpusScore score_units(std::span<const ElementSegmentation> est_elements,
                        std::span<const UnitSegmentation> est_units,
                        std::span<const ElementSegmentation> truth_elements,
                        std::span<const UnitSegmentation> truth_units, bool string_labels,
                        MappingKind kind = MappingKind::Greedy);

}  // namespace gphsmm
