#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gphsmm/eval.hpp"
#include "gphsmm/synth.hpp"
#include "gphsmm/trainer.hpp"
#include "gphsmm/types.hpp"

namespace gphsmm {

struct CsvSchema {
  std::string id_column = "sequence_id";
  /// Ignored when absent from the header.
  std::string time_column = "time";
  /// Explicit value columns; every other column when empty.
  std::vector<std::string> value_columns;
  double rate_hz = 5.0;

  friend bool operator==(const CsvSchema&, const CsvSchema&) = default;
};

struct Standardization {
  std::vector<double> mean;
  std::vector<double> sd;
};

struct Corpus {
  std::vector<TimeSeries> series;
  std::optional<Standardization> standardization;
};

/// Reads one or more CSV files with a header row. Rows are grouped by the id column in
/// order of first appearance. Throws DataError naming the row and column of bad cells.
Corpus read_corpus(const std::vector<std::filesystem::path>& paths, const CsvSchema& schema,
                   bool standardize = false);
Corpus read_corpus(std::istream& in, const std::string& source, const CsvSchema& schema,
                   bool standardize = false);

/// Z-scores every dimension over the whole corpus in place.
Standardization standardize(std::vector<TimeSeries>& series);

void write_corpus(std::ostream& out, const std::vector<TimeSeries>& series);

/// Segmentation table: sequence_id,start,end,element_class,unit_class,unit_index.
/// Unit columns are empty when `units` is empty. Tiling is checked against
/// `lengths` (when given) before anything is written.
void write_segmentation(std::ostream& out, const std::vector<ElementSegmentation>& elements,
                        const std::vector<UnitSegmentation>& units,
                        const std::vector<std::size_t>& lengths = {});

struct SegmentationTable {
  std::vector<ElementSegmentation> elements;
  /// Empty when the file has no unit columns filled.
  std::vector<UnitSegmentation> units;
};
SegmentationTable read_segmentation(std::istream& in, const std::string& source = "<stream>");
SegmentationTable read_segmentation(const std::filesystem::path& path);

/// Everything a CLI run needs besides input paths.
struct RunConfig {
  Hyperparams hyper;
  EmissionMode mode = EmissionMode::MotionUnigram;
  MappingKind mapping = MappingKind::Greedy;
  CsvSchema schema;
  bool standardize = false;
  unsigned threads = 0;
  bool checkpoint_every_iteration = true;
  std::string data;
  std::string output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys and bad values throw ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const SynthConfig& cfg);
SynthConfig synth_config_from_json(const nlohmann::json& j, SynthConfig base = {});

nlohmann::json to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

/// Writes through a temporary file so readers never see a partial snapshot.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace gphsmm
