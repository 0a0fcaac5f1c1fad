#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "gphsmm/emission.hpp"
#include "gphsmm/lower.hpp"
#include "gphsmm/types.hpp"
#include "gphsmm/upper.hpp"

namespace gphsmm {

/// Snapshot of a sampler after one mutual-update iteration.
struct Checkpoint {
  static constexpr int kVersion = 1;

  EmissionMode mode = EmissionMode::LowerOnly;
  std::uint64_t seed = 0;
  int iteration = 0;
  std::vector<double> trace;
  std::vector<ElementSegmentation> elements;
  std::vector<UnitSegmentation> units;
  bool prior_uniform = true;
};

struct TrainOptions {
  /// Called after every iteration with the current state.
  std::function<void(const Checkpoint&)> on_iteration;
  /// Keep the element prior uniform even when the upper layer runs.
  bool freeze_prior = false;
  /// Worker threads for independent restarts; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

struct TrainedModel {
  EmissionMode mode = EmissionMode::LowerOnly;
  std::uint64_t seed = 0;
  /// Joint log-likelihood after each iteration.
  std::vector<double> trace;
  std::vector<ElementSegmentation> elements;
  /// Empty segmentations in lower-only mode.
  std::vector<UnitSegmentation> units;

  double log_likelihood() const { return trace.empty() ? kLogZero : trace.back(); }
};

/// One chain of mutual updates: per iteration every sequence's elements are
/// resampled, then (unless lower-only) every sequence's units, then the element
/// prior is rebuilt from the unit statistics.
TrainedModel train(const std::vector<TimeSeries>& corpus, const Hyperparams& h, EmissionMode mode,
                   std::uint64_t seed, const TrainOptions& options = {});

/// Seed of restart r, derived from the configured root seed.
std::uint64_t restart_seed(std::uint64_t root_seed, int restart);

/// h.restarts independent chains, returned in restart order.
std::vector<TrainedModel> train_restarts(const std::vector<TimeSeries>& corpus,
                                         const Hyperparams& h, EmissionMode mode,
                                         const TrainOptions& options = {});

/// Index of the run with the highest final log-likelihood; ties go to the lowest seed.
std::size_t best_run_index(std::span<const TrainedModel> runs);
const TrainedModel& select_best(std::span<const TrainedModel> runs);

/// Model rebuilt from a finished run, used to segment sequences it was not trained on.
class FrozenModel {
 public:
  FrozenModel(const std::vector<TimeSeries>& training, const Hyperparams& h, EmissionMode mode,
              const std::vector<ElementSegmentation>& elements,
              const std::vector<UnitSegmentation>& units);

  /// Alternates lower and upper sampling `sweeps` times without updating the model.
  std::pair<ElementSegmentation, UnitSegmentation> segment(const TimeSeries& series, Rng& rng,
                                                           int sweeps = 2) const;

 private:
  Hyperparams h_;
  EmissionMode mode_;
  LowerLayer lower_;
  EmissionCounts counts_;
  UnitTransitionTable unit_trans_;
  ElementPrior prior_;
};

}  // namespace gphsmm
