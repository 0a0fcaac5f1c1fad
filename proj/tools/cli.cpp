#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "gphsmm/errors.hpp"
#include "gphsmm/synth.hpp"
#include "gphsmm/trainer.hpp"

namespace gphsmm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string restart_name(std::size_t r, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "restart_%02zu.%s", r, ext);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text_atomic(path, text);
}

std::string segmentation_csv(const std::vector<ElementSegmentation>& elements,
                             const std::vector<UnitSegmentation>& units,
                             const std::vector<TimeSeries>& series) {
  std::vector<std::size_t> lengths;
  for (const auto& s : series) lengths.push_back(s.length());
  std::ostringstream os;
  write_segmentation(os, elements, units, lengths);
  return os.str();
}

json parse_json_file(const fs::path& path, bool config) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    if (config) throw ConfigError(path.string() + ": " + e.what());
    throw DataError(path.string() + ": " + e.what());
  }
}

void apply_standardization(std::vector<TimeSeries>& series, const Standardization& st) {
  for (auto& s : series) {
    if (s.dim() != st.mean.size()) throw DataError("dimension differs from the training corpus");
    for (std::size_t t = 0; t < s.length(); ++t)
      for (std::size_t d = 0; d < s.dim(); ++d)
        s.at(t, d) = st.sd[d] > 0.0 ? (s.at(t, d) - st.mean[d]) / st.sd[d] : 0.0;
  }
}

// ---- synth

struct SynthArgs {
  std::string preset = "assembly";
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
  double noise = -1.0;
  double fluctuation = -1.0;
};

void cmd_synth(const SynthArgs& a) {
  SynthConfig cfg;
  if (a.preset == "assembly") cfg = assembly_preset();
  else if (a.preset != "default") throw ConfigError("unknown preset '" + a.preset + "'");
  if (!a.config.empty()) cfg = synth_config_from_json(parse_json_file(a.config, true), cfg);
  if (a.noise >= 0.0) cfg.noise_sigma = a.noise;
  if (a.fluctuation >= 0.0) cfg.fluctuation = a.fluctuation;
  validate_synth_config(cfg);
  const auto corpus = generate(cfg, a.seed);
  const fs::path out(a.out);
  std::ostringstream data;
  write_corpus(data, corpus.series);
  write_file(out / "corpus.csv", data.str());
  write_file(out / "truth.csv", segmentation_csv(corpus.elements, corpus.units, corpus.series));
  json meta = {{"seed", a.seed}, {"preset", a.preset}, {"config", to_json(cfg)}};
  write_file(out / "synth_config.json", meta.dump(2) + "\n");
  std::cout << "wrote " << corpus.series.size() << " sequences to " << out.string() << "\n";
}

// ---- train

struct TrainArgs {
  std::string config;
  std::vector<std::string> data;
  std::string mode;
  std::string out;
  std::int64_t seed = -1;
  int restarts = -1;
  int iterations = -1;
  int threads = -1;
};

Corpus load_corpus(const std::vector<std::string>& data, const RunConfig& cfg) {
  if (data.empty()) throw ConfigError("no input data given");
  std::vector<fs::path> paths(data.begin(), data.end());
  return read_corpus(paths, cfg.schema, cfg.standardize);
}

void cmd_train(const TrainArgs& a) {
  RunConfig cfg;
  if (!a.config.empty()) cfg = load_run_config(a.config);
  if (!a.mode.empty()) cfg.mode = parse_emission_mode(a.mode);
  if (a.seed >= 0) cfg.hyper.seed = static_cast<std::uint64_t>(a.seed);
  if (a.restarts >= 0) cfg.hyper.restarts = a.restarts;
  if (a.iterations >= 0) cfg.hyper.iterations = a.iterations;
  if (a.threads >= 0) cfg.threads = static_cast<unsigned>(a.threads);
  if (!a.out.empty()) cfg.output = a.out;
  std::vector<std::string> data = a.data;
  if (data.empty() && !cfg.data.empty()) data.push_back(cfg.data);
  if (cfg.output.empty()) throw ConfigError("no output directory given");
  validate_hyperparams(cfg.hyper);

  const Corpus corpus = load_corpus(data, cfg);
  const fs::path out(cfg.output);
  fs::create_directories(out / "restarts");
  if (cfg.checkpoint_every_iteration) fs::create_directories(out / "checkpoints");

  TrainOptions opts;
  opts.threads = cfg.threads;
  if (cfg.checkpoint_every_iteration) {
    std::map<std::uint64_t, std::size_t> index;
    for (int r = 0; r < cfg.hyper.restarts; ++r)
      index[restart_seed(cfg.hyper.seed, r)] = static_cast<std::size_t>(r);
    opts.on_iteration = [out, index](const Checkpoint& cp) {
      const auto r = index.at(cp.seed);
      write_text_atomic(out / "checkpoints" / restart_name(r, "json"), to_json(cp).dump() + "\n");
    };
  }
  const auto runs = train_restarts(corpus.series, cfg.hyper, cfg.mode, opts);
  const std::size_t best = best_run_index(runs);

  json restarts = json::array();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto file = restart_name(r, "csv");
    write_file(out / "restarts" / file, segmentation_csv(runs[r].elements, runs[r].units, corpus.series));
    restarts.push_back({{"index", r},
                        {"seed", runs[r].seed},
                        {"log_likelihood", runs[r].log_likelihood()},
                        {"trace", runs[r].trace},
                        {"segmentation", "restarts/" + file}});
  }
  write_file(out / "segmentation.csv",
             segmentation_csv(runs[best].elements, runs[best].units, corpus.series));

  RunConfig stored = cfg;
  stored.output.clear();
  stored.data.clear();
  json run = {{"mode", std::string(to_string(cfg.mode))},
              {"config", to_json(stored)},
              {"data", data},
              {"best", best},
              {"restarts", restarts}};
  if (corpus.standardization)
    run["standardization"] = {{"mean", corpus.standardization->mean}, {"sd", corpus.standardization->sd}};
  write_file(out / "run.json", run.dump(2) + "\n");
  std::cout << to_string(cfg.mode) << ": best restart " << best << " log-likelihood "
            << runs[best].log_likelihood() << "\n";
}

// ---- segment

struct SegmentArgs {
  std::string run;
  std::vector<std::string> data;
  std::string out;
  std::uint64_t seed = 1;
  int sweeps = 2;
};

struct LoadedRun {
  RunConfig cfg;
  json meta;
};

LoadedRun load_run(const fs::path& dir) {
  LoadedRun r;
  r.meta = parse_json_file(dir / "run.json", false);
  try {
    r.cfg = run_config_from_json(r.meta.at("config"));
  } catch (const json::exception& e) {
    throw DataError((dir / "run.json").string() + ": " + e.what());
  }
  return r;
}

void cmd_segment(const SegmentArgs& a) {
  const fs::path dir(a.run);
  const auto run = load_run(dir);
  std::vector<std::string> train_data;
  try {
    train_data = run.meta.at("data").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError("run.json: " + std::string(e.what()));
  }
  const Corpus training = load_corpus(train_data, run.cfg);
  const auto seg = read_segmentation(dir / "segmentation.csv");
  std::vector<UnitSegmentation> units = seg.units;
  if (units.empty())
    for (const auto& e : seg.elements) units.push_back({e.series_id, {}});
  const FrozenModel model(training.series, run.cfg.hyper, run.cfg.mode, seg.elements, units);

  RunConfig plain = run.cfg;
  plain.standardize = false;
  Corpus fresh = load_corpus(a.data, plain);
  if (training.standardization) apply_standardization(fresh.series, *training.standardization);

  Rng root(a.seed);
  std::vector<ElementSegmentation> elements;
  std::vector<UnitSegmentation> out_units;
  for (std::size_t i = 0; i < fresh.series.size(); ++i) {
    Rng rng = root.split(i);
    auto [e, u] = model.segment(fresh.series[i], rng, a.sweeps);
    elements.push_back(std::move(e));
    out_units.push_back(std::move(u));
  }
  if (run.cfg.mode == EmissionMode::LowerOnly) out_units.clear();
  write_file(a.out, segmentation_csv(elements, out_units, fresh.series));
  std::cout << "segmented " << fresh.series.size() << " sequences\n";
}

// ---- eval / report

struct EvalArgs {
  std::string truth;
  std::vector<std::string> runs;
  std::string out;
  std::string mapping;
};

MappingKind mapping_from(const std::string& s, const RunConfig& fallback) {
  if (s.empty()) return fallback.mapping;
  if (s == "greedy") return MappingKind::Greedy;
  if (s == "hungarian") return MappingKind::Hungarian;
  throw ConfigError("unknown mapping '" + s + "'");
}

std::vector<MethodResult> evaluate_all(const EvalArgs& a, SegmentationTable& truth) {
  truth = read_segmentation(fs::path(a.truth));
  if (truth.units.empty()) throw DataError(a.truth + ": ground truth needs unit columns");
  std::vector<MethodResult> results;
  for (const auto& r : a.runs) {
    const auto run = load_run(r);
    results.push_back(evaluate_run(r, truth, mapping_from(a.mapping, run.cfg)));
  }
  return results;
}

json result_json(const MethodResult& r) {
  return {{"method", r.method},
          {"best", r.best},
          {"element_nld", r.element_nld},
          {"unit_nld", r.unit_nld},
          {"distinct_units", r.distinct_units},
          {"log_likelihood", r.log_likelihood}};
}

void cmd_eval(const EvalArgs& a) {
  SegmentationTable truth;
  const auto results = evaluate_all(a, truth);
  const fs::path out(a.out);
  const auto table = nld_table(results);
  write_file(out / "nld_table.tsv", table);
  write_file(out / "nld_histogram.tsv", histogram_tsv(results));
  json j = json::array();
  for (const auto& r : results) j.push_back(result_json(r));
  write_file(out / "eval.json", j.dump(2) + "\n");
  std::cout << table;
}

void cmd_report(const EvalArgs& a, std::size_t max_sequences) {
  SegmentationTable truth;
  const auto results = evaluate_all(a, truth);
  const fs::path out(a.out);
  write_file(out / "nld_histogram.tsv", histogram_tsv(results));
  write_file(out / "nld_histogram.svg", histogram_svg(results));
  write_file(out / "nld_table.tsv", nld_table(results));
  write_file(out / "truth_timeline.tsv", timeline_tsv(truth.elements, truth.units));
  write_file(out / "truth_timeline.svg", timeline_svg(truth.elements, truth.units, max_sequences));
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    const auto seg = read_segmentation(fs::path(a.runs[i]) / "segmentation.csv");
    const auto stem = results[i].method + "_timeline";
    write_file(out / (stem + ".tsv"), timeline_tsv(seg.elements, seg.units));
    write_file(out / (stem + ".svg"), timeline_svg(seg.elements, seg.units, max_sequences));
  }
  std::cout << "report written to " << out.string() << "\n";
}

}  // namespace

MethodResult evaluate_run(const fs::path& run_dir, const SegmentationTable& truth,
                          MappingKind mapping) {
  const auto run = load_run(run_dir);
  MethodResult result;
  result.method = std::string(to_string(run.cfg.mode));
  const bool ws = run.cfg.mode == EmissionMode::WordSegmentation;
  try {
    result.best = run.meta.at("best").get<std::size_t>();
    for (const auto& r : run.meta.at("restarts")) {
      const auto seg = read_segmentation(run_dir / r.at("segmentation").get<std::string>());
      if (seg.elements.size() != truth.elements.size())
        throw DataError(run_dir.string() + ": sequence count differs from ground truth");
      for (std::size_t i = 0; i < seg.elements.size(); ++i)
        if (seg.elements[i].series_id != truth.elements[i].series_id)
          throw DataError(run_dir.string() + ": sequence '" + seg.elements[i].series_id +
                          "' is not aligned with ground truth");
      result.element_nld.push_back(score_elements(seg.elements, truth.elements, mapping).mean_nld);
      result.log_likelihood.push_back(r.at("log_likelihood").get<double>());
      if (!seg.units.empty()) {
        const auto us = score_units(seg.elements, seg.units, truth.elements, truth.units, ws, mapping);
        result.unit_nld.push_back(us.mean_nld);
        result.distinct_units.push_back(us.distinct_labels);
      }
    }
  } catch (const json::exception& e) {
    throw DataError((run_dir / "run.json").string() + ": " + e.what());
  }
  return result;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Two-layer motion segmentation"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  synth->add_option("--preset", sa.preset, "assembly or default")->capture_default_str();
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_option("--config", sa.config, "JSON overrides");
  synth->add_option("--noise", sa.noise, "noise sd override");
  synth->add_option("--fluctuation", sa.fluctuation, "fluctuation rate override");
  synth->add_option("--out", sa.out)->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "fit the model with restarts");
  train->add_option("--config", ta.config, "JSON run config");
  train->add_option("--data", ta.data, "CSV files");
  train->add_option("--mode", ta.mode, "ws|meu|meb|lower-only");
  train->add_option("--seed", ta.seed);
  train->add_option("--restarts", ta.restarts);
  train->add_option("--iterations", ta.iterations);
  train->add_option("--threads", ta.threads);
  train->add_option("--out", ta.out);

  SegmentArgs ga;
  auto* segment = app.add_subcommand("segment", "segment new data with a trained run");
  segment->add_option("--run", ga.run)->required();
  segment->add_option("--data", ga.data)->required();
  segment->add_option("--out", ga.out)->required();
  segment->add_option("--seed", ga.seed)->capture_default_str();
  segment->add_option("--sweeps", ga.sweeps)->capture_default_str();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "NLD tables against ground truth");
  eval->add_option("--truth", ea.truth)->required();
  eval->add_option("--run", ea.runs)->required();
  eval->add_option("--mapping", ea.mapping, "greedy|hungarian");
  eval->add_option("--out", ea.out)->required();

  EvalArgs ra;
  std::size_t max_sequences = 20;
  auto* report = app.add_subcommand("report", "histograms and timelines");
  report->add_option("--truth", ra.truth)->required();
  report->add_option("--run", ra.runs)->required();
  report->add_option("--mapping", ra.mapping, "greedy|hungarian");
  report->add_option("--max-sequences", max_sequences)->capture_default_str();
  report->add_option("--out", ra.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*synth) cmd_synth(sa);
    else if (*train) cmd_train(ta);
    else if (*segment) cmd_segment(ga);
    else if (*eval) cmd_eval(ea);
    else if (*report) cmd_report(ra, max_sequences);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gphsmm::cli
