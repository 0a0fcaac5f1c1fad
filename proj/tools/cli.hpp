#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gphsmm/eval.hpp"
#include "gphsmm/io.hpp"
#include "gphsmm/report.hpp"

namespace gphsmm::cli {

/// Runs one command line; returns the process exit code (0 ok, 1 config, 2 data, 3 numeric).
int run(int argc, const char* const* argv);

/// Scores every restart stored in a training output directory against ground truth.
MethodResult evaluate_run(const std::filesystem::path& run_dir, const SegmentationTable& truth,
                          MappingKind mapping);

}  // namespace gphsmm::cli
