#include "gphsmm/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "gphsmm/errors.hpp"

namespace gphsmm {

namespace {

// Independent RNG streams of one chain.
enum Stream : std::uint64_t { kInit = 0, kGp = 1, kLower = 2, kUpper = 3 };

}  // namespace

TrainedModel train(const std::vector<TimeSeries>& corpus, const Hyperparams& h, EmissionMode mode,
                   std::uint64_t seed, const TrainOptions& options) {
  validate_hyperparams(h);
  if (corpus.empty()) throw DataError("corpus is empty");

  const Rng root(seed);
  Rng init_rng = root.split(kInit);
  Rng lower_rng = root.split(kLower);
  Rng upper_rng = root.split(kUpper);
  const auto num_units = static_cast<std::size_t>(h.num_unit_classes);
  const auto num_elements = static_cast<std::size_t>(h.num_element_classes);

  LowerLayer lower(corpus, h, root.split(kGp).seed());
  std::optional<UpperLayer> upper;
  if (mode != EmissionMode::LowerOnly) upper.emplace(corpus.size(), h, mode);
  ElementPrior prior = ElementPrior::uniform(num_elements, num_units);

  lower.initialize_random(init_rng);

  TrainedModel out;
  out.mode = mode;
  out.seed = seed;
  std::vector<std::vector<std::size_t>> contexts(corpus.size());

  for (int m = 1; m <= h.iterations; ++m) {
    try {
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (upper && upper->assigned(i) && !prior.is_uniform())
          contexts[i] = unit_context(lower.segmentation(i), upper->segmentation(i),
                                     corpus[i].length(), num_units);
        else
          contexts[i].assign(corpus[i].length(), 0);
        lower.resample_sequence(i, prior, contexts[i], lower_rng);
      }
      const ElementPrior used = prior;
      if (upper) {
        for (std::size_t i = 0; i < corpus.size(); ++i)
          upper->resample_unit_sequence(i, lower.segmentation(i).classes(), corpus[i].id(),
                                        upper_rng);
        if (!options.freeze_prior) prior = element_prior(upper->counts(), mode, h.mu);
      }

      double ll = 0.0;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        ll += lower.sequence_log_score(i, used, contexts[i]);
        if (upper) ll += upper->sequence_log_score(i);
      }
      if (!std::isfinite(ll))
        throw NumericError("joint log-likelihood is not finite");
      out.trace.push_back(ll);
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(m) + ": " + e.what());
    }

    if (options.on_iteration) {
      Checkpoint cp;
      cp.mode = mode;
      cp.seed = seed;
      cp.iteration = m;
      cp.trace = out.trace;
      cp.elements = lower.segmentations();
      if (upper) cp.units = upper->segmentations();
      cp.prior_uniform = prior.is_uniform();
      options.on_iteration(cp);
    }
  }

  out.elements = lower.segmentations();
  if (upper) {
    out.units = upper->segmentations();
  } else {
    out.units.resize(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) out.units[i].series_id = corpus[i].id();
  }
  return out;
}

std::uint64_t restart_seed(std::uint64_t root_seed, int restart) {
  return Rng(root_seed).split(0x5eed0000ULL + static_cast<std::uint64_t>(restart)).seed();
}

std::vector<TrainedModel> train_restarts(const std::vector<TimeSeries>& corpus,
                                         const Hyperparams& h, EmissionMode mode,
                                         const TrainOptions& options) {
  validate_hyperparams(h);
  const auto n = static_cast<std::size_t>(h.restarts);
  std::vector<TrainedModel> runs(n);
  unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < n; r = next++) {
      try {
        runs[r] = train(corpus, h, mode, restart_seed(h.seed, static_cast<int>(r)), options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

std::size_t best_run_index(std::span<const TrainedModel> runs) {
  if (runs.empty()) throw std::invalid_argument("select_best: no runs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const double a = runs[i].log_likelihood();
    const double b = runs[best].log_likelihood();
    if (a > b || (a == b && runs[i].seed < runs[best].seed)) best = i;
  }
  return best;
}

const TrainedModel& select_best(std::span<const TrainedModel> runs) {
  return runs[best_run_index(runs)];
}

FrozenModel::FrozenModel(const std::vector<TimeSeries>& training, const Hyperparams& h,
                         EmissionMode mode, const std::vector<ElementSegmentation>& elements,
                         const std::vector<UnitSegmentation>& units)
    : h_(validate_hyperparams(h)), mode_(mode), lower_(training, h, Rng(h.seed).split(kGp).seed()),
      counts_(static_cast<std::size_t>(h.num_element_classes),
              static_cast<std::size_t>(h.num_unit_classes)),
      unit_trans_(static_cast<std::size_t>(h.num_unit_classes), h.transition_smoothing),
      prior_(ElementPrior::uniform(static_cast<std::size_t>(h.num_element_classes),
                                   static_cast<std::size_t>(h.num_unit_classes))) {
  if (elements.size() != training.size())
    throw DataError("segmentation count does not match the training corpus");
  for (std::size_t i = 0; i < training.size(); ++i) lower_.assign(i, elements[i]);
  for (const auto& gp : lower_.gps()) gp.refresh();
  if (mode_ == EmissionMode::LowerOnly) return;
  if (units.size() != training.size())
    throw DataError("unit segmentation count does not match the training corpus");
  for (std::size_t i = 0; i < training.size(); ++i) {
    const auto classes = elements[i].classes();
    counts_.add(classes, units[i]);
    std::vector<int> ub;
    for (const auto& u : units[i].segments) ub.push_back(u.class_id);
    unit_trans_.add(ub);
  }
  prior_ = element_prior(counts_, mode_, h_.mu);
}

std::pair<ElementSegmentation, UnitSegmentation> FrozenModel::segment(const TimeSeries& series,
                                                                      Rng& rng, int sweeps) const {
  const auto num_units = static_cast<std::size_t>(h_.num_unit_classes);
  const auto scores = score_segments(series, lower_.gps(), lower_.max_len());
  const auto transitions = lower_transitions(lower_.transitions(), prior_);
  const DurationModel unit_dur(h_.unit_duration_mean(), static_cast<std::size_t>(h_.max_unit_len));

  std::vector<std::size_t> context(series.length(), 0);
  ElementSegmentation elements;
  UnitSegmentation units{series.id(), {}};
  for (int sweep = 0; sweep < std::max(1, sweeps); ++sweep) {
    const auto lattice =
        hsmm::forward_filter(scores, lower_.duration().log_table(), transitions, context);
    elements = {series.id(), {}};
    for (const auto& p : hsmm::backward_sample(lattice, transitions, context, rng))
      elements.segments.push_back({p.start, p.end, p.state});
    if (mode_ == EmissionMode::LowerOnly) break;
    const EmissionModel em(mode_, counts_, h_.alpha);
    const auto classes = elements.classes();
    units = unit_backward_sample(unit_forward_filter(classes, em, unit_trans_, unit_dur),
                                 unit_trans_, rng, series.id());
    context = unit_context(elements, units, series.length(), num_units);
  }
  return {elements, units};
}

}  // namespace gphsmm
