#include "gphsmm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gphsmm/errors.hpp"
#include "gphsmm/rng.hpp"

namespace gphsmm {

double Prototype::value(std::size_t d, double t) const {
  double v = offset[d];
  for (const auto& w : waves[d]) v += w.amplitude * std::sin(w.frequency * t + w.phase);
  return v;
}

SynthConfig assembly_preset() {
  SynthConfig cfg;
  cfg.num_element_labels = 8;
  cfg.unit_elements = {{0, 1, 2}, {3, 4, 3, 4, 3, 4}, {5, 6, 7}};
  cfg.procedure = {0, 1, 2};
  cfg.min_seconds = 29.0;
  cfg.max_seconds = 65.0;
  cfg.noise_sigma = 0.1;
  cfg.fluctuation = 0.2;
  return cfg;
}

void validate_synth_config(const SynthConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("synth: " + msg); };
  if (cfg.dim == 0) fail("dim must be >= 1");
  if (!(cfg.rate_hz > 0.0)) fail("rate_hz must be > 0");
  if (cfg.workers < 1 || cfg.cycles_per_worker < 1) fail("workers and cycles must be >= 1");
  if (cfg.num_element_labels < 1) fail("num_element_labels must be >= 1");
  if (cfg.unit_elements.empty()) fail("at least one unit is required");
  for (const auto& u : cfg.unit_elements) {
    if (u.empty()) fail("units must contain at least one element");
    for (int e : u)
      if (e < 0 || e >= cfg.num_element_labels) fail("unit element label out of range");
  }
  if (cfg.procedure.empty()) fail("procedure is empty");
  for (int u : cfg.procedure)
    if (u < 0 || static_cast<std::size_t>(u) >= cfg.unit_elements.size()) fail("procedure unit out of range");
  if (!cfg.prototypes.empty()) {
    if (cfg.prototypes.size() != static_cast<std::size_t>(cfg.num_element_labels))
      fail("need one prototype per element label");
    for (const auto& p : cfg.prototypes)
      if (p.offset.size() != cfg.dim || p.waves.size() != cfg.dim)
        fail("prototype dimension does not match dim");
  }
  if (cfg.min_element_len < 1 || cfg.max_element_len < cfg.min_element_len)
    fail("element length bounds are inconsistent");
  if (!(cfg.mean_duration > 0.0)) fail("mean_duration must be > 0");
  if (cfg.noise_sigma < 0.0) fail("noise_sigma must be >= 0");
  if (cfg.fluctuation < 0.0 || cfg.fluctuation > 1.0) fail("fluctuation must lie in [0, 1]");
  if (cfg.max_seconds > 0.0 && cfg.min_seconds > cfg.max_seconds) fail("min_seconds exceeds max_seconds");
}

namespace {

std::vector<Prototype> random_prototypes(const SynthConfig& cfg, Rng& rng) {
  std::vector<Prototype> out(static_cast<std::size_t>(cfg.num_element_labels));
  for (auto& p : out) {
    p.offset.resize(cfg.dim);
    p.waves.resize(cfg.dim);
    for (std::size_t d = 0; d < cfg.dim; ++d) {
      p.offset[d] = -1.5 + 3.0 * rng.uniform();
      for (int w = 0; w < cfg.waves_per_dim; ++w) {
        const double period = 10.0 + 30.0 * rng.uniform();  // samples
        p.waves[d].push_back({0.2 + 0.6 * rng.uniform(), 2.0 * std::numbers::pi / period,
                              2.0 * std::numbers::pi * rng.uniform()});
      }
    }
  }
  return out;
}

// Element labels of one cycle with fluctuations applied; unit spans in element indices.
void perform_cycle(const SynthConfig& cfg, Rng& rng, std::vector<int>& labels,
                   std::vector<UnitSegment>& units) {
  labels.clear();
  units.clear();
  for (int u : cfg.procedure) {
    std::vector<int> seq = cfg.unit_elements[static_cast<std::size_t>(u)];
    for (std::size_t j = 0; j < seq.size(); ++j) {
      if (rng.uniform() >= cfg.fluctuation) continue;
      const bool swap = j + 1 < seq.size() && seq[j] != seq[j + 1] && rng.uniform() < 0.5;
      if (swap) {
        std::swap(seq[j], seq[j + 1]);
        ++j;
      } else if (cfg.num_element_labels > 1) {
        int sub = static_cast<int>(rng.index(static_cast<std::size_t>(cfg.num_element_labels - 1)));
        if (sub >= seq[j]) ++sub;
        seq[j] = sub;
      }
    }
    units.push_back({labels.size(), labels.size() + seq.size(), u});
    labels.insert(labels.end(), seq.begin(), seq.end());
  }
}

}  // namespace

SynthCorpus generate(const SynthConfig& cfg, std::uint64_t seed) {
  validate_synth_config(cfg);
  const Rng root(seed);
  Rng proto_rng = root.split(0);
  Rng rng = root.split(1);

  SynthCorpus out;
  out.prototypes = cfg.prototypes.empty() ? random_prototypes(cfg, proto_rng) : cfg.prototypes;

  std::vector<double> base_duration(static_cast<std::size_t>(cfg.num_element_labels));
  for (double& d : base_duration) d = cfg.mean_duration * (0.75 + 0.5 * rng.uniform());

  const auto min_len = static_cast<std::size_t>(std::ceil(cfg.min_seconds * cfg.rate_hz));
  const auto max_len = cfg.max_seconds > 0.0
                           ? static_cast<std::size_t>(std::floor(cfg.max_seconds * cfg.rate_hz))
                           : std::size_t{0};

  std::vector<int> labels;
  std::vector<UnitSegment> unit_segs;
  std::vector<std::size_t> durations;
  for (int w = 0; w < cfg.workers; ++w) {
    const double speed = std::exp(cfg.worker_speed_spread * rng.normal());
    for (int cycle = 0; cycle < cfg.cycles_per_worker; ++cycle) {
      const std::string id =
          "w" + std::to_string(w + 1) + "_c" + (cycle + 1 < 10 ? "0" : "") + std::to_string(cycle + 1);
      perform_cycle(cfg, rng, labels, unit_segs);

      std::size_t total = 0;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        durations.clear();
        total = 0;
        for (int label : labels) {
          const double mean = base_duration[static_cast<std::size_t>(label)] * speed;
          const double draw = std::round(mean * (1.0 + cfg.duration_jitter * rng.normal()));
          const auto len = static_cast<std::size_t>(
              std::clamp(draw, static_cast<double>(cfg.min_element_len),
                         static_cast<double>(cfg.max_element_len)));
          durations.push_back(len);
          total += len;
        }
        if (total >= min_len && (max_len == 0 || total <= max_len)) break;
        if (attempt == 999)
          throw ConfigError("synth: cannot meet the sequence length bounds with these durations");
      }

      std::vector<double> data;
      data.reserve(total * cfg.dim);
      ElementSegmentation eseg{id, {}};
      std::size_t t0 = 0;
      for (std::size_t j = 0; j < labels.size(); ++j) {
        const auto& proto = out.prototypes[static_cast<std::size_t>(labels[j])];
        for (std::size_t t = 0; t < durations[j]; ++t)
          for (std::size_t d = 0; d < cfg.dim; ++d)
            data.push_back(proto.value(d, static_cast<double>(t)) + cfg.noise_sigma * rng.normal());
        eseg.segments.push_back({t0, t0 + durations[j], labels[j]});
        t0 += durations[j];
      }
      out.series.emplace_back(id, cfg.dim, std::move(data), cfg.rate_hz);
      out.elements.push_back(std::move(eseg));
      out.units.push_back({id, unit_segs});
      out.worker.push_back(w);
    }
  }
  return out;
}

}  // namespace gphsmm
