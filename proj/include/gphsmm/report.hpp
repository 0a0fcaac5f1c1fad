#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gphsmm/types.hpp"

namespace gphsmm {

/// Scores of every restart of one method.
struct MethodResult {
  std::string method;
  std::vector<double> element_nld;
  /// Empty for runs without an upper layer.
  std::vector<double> unit_nld;
  std::vector<std::size_t> distinct_units;
  std::vector<double> log_likelihood;
  /// Run picked by likelihood.
  std::size_t best = 0;
};

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

/// Equal-width bins over [0,1]; 1.0 falls in the last bin.
Histogram nld_histogram(std::span<const double> values, std::size_t bins = 10);

/// Tab-separated, one row per method: best-run scores plus trial means.
std::string nld_table(std::span<const MethodResult> results);

/// Tab-separated: method, level, bin_lo, bin_hi, count.
std::string histogram_tsv(std::span<const MethodResult> results, std::size_t bins = 10);
std::string histogram_svg(std::span<const MethodResult> results, std::size_t bins = 10);

/// Tab-separated colored intervals: sequence_id, layer, start, end, class, color.
std::string timeline_tsv(std::span<const ElementSegmentation> elements,
                         std::span<const UnitSegmentation> units);
/// One row per sequence, element band above the unit band.
std::string timeline_svg(std::span<const ElementSegmentation> elements,
                         std::span<const UnitSegmentation> units, std::size_t max_sequences = 20);

/// Fixed qualitative palette, cycled.
std::string class_color(int class_id);

}  // namespace gphsmm
