#include "gphsmm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gphsmm/emission.hpp"
#include "gphsmm/errors.hpp"

namespace gphsmm {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const std::string& source, std::size_t row, std::size_t col, const std::string& name) {
  std::ostringstream os;
  os << source << ": row " << row << ", column " << col + 1 << " (" << name << ")";
  return os.str();
}

double parse_double(const std::string& cell, const std::string& location) {
  double v = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last)
    throw DataError(location + ": '" + cell + "' is not a number");
  if (!std::isfinite(v)) throw DataError(location + ": non-finite value '" + cell + "'");
  return v;
}

long long parse_int(const std::string& cell, const std::string& location) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw DataError(location + ": '" + cell + "' is not an integer");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Accumulator {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<double>> data;
  std::size_t dim = 0;
};

void read_into(std::istream& in, const std::string& source, const CsvSchema& schema, Accumulator& acc) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header row");
  const auto header = split_csv(line);
  std::optional<std::size_t> id_col;
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == schema.id_column) id_col = c;
  if (!id_col) throw DataError(source + ": no '" + schema.id_column + "' column in header");
  if (schema.value_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != *id_col && header[c] != schema.time_column) value_cols.push_back(c);
  } else {
    for (const auto& name : schema.value_columns) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw DataError(source + ": no '" + name + "' column in header");
      value_cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }
  if (value_cols.empty()) throw DataError(source + ": no value columns");
  if (acc.dim != 0 && acc.dim != value_cols.size())
    throw DataError(source + ": " + std::to_string(value_cols.size()) +
                    " value columns, expected " + std::to_string(acc.dim));
  acc.dim = value_cols.size();

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw DataError(source + ": row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    const std::string& id = cells[*id_col];
    if (id.empty()) throw DataError(where(source, row, *id_col, schema.id_column) + ": empty id");
    auto [it, inserted] = acc.data.try_emplace(id);
    if (inserted) acc.order.push_back(id);
    for (std::size_t c : value_cols)
      it->second.push_back(parse_double(cells[c], where(source, row, c, header[c])));
  }
}

Corpus finish(Accumulator& acc, const CsvSchema& schema, bool standardize_values) {
  Corpus corpus;
  for (const auto& id : acc.order)
    corpus.series.emplace_back(id, acc.dim, std::move(acc.data[id]), schema.rate_hz);
  if (corpus.series.empty()) throw DataError("no sequences found");
  if (standardize_values) corpus.standardization = standardize(corpus.series);
  return corpus;
}

}  // namespace

Corpus read_corpus(std::istream& in, const std::string& source, const CsvSchema& schema,
                   bool standardize_values) {
  Accumulator acc;
  read_into(in, source, schema, acc);
  return finish(acc, schema, standardize_values);
}

Corpus read_corpus(const std::vector<std::filesystem::path>& paths, const CsvSchema& schema,
                   bool standardize_values) {
  Accumulator acc;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open " + p.string());
    read_into(in, p.string(), schema, acc);
  }
  return finish(acc, schema, standardize_values);
}

Standardization standardize(std::vector<TimeSeries>& series) {
  if (series.empty()) return {};
  const std::size_t dim = series.front().dim();
  Standardization st{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  double n = 0.0;
  for (const auto& s : series) {
    if (s.dim() != dim) throw DataError("mixed dimensionality in corpus");
    n += static_cast<double>(s.length());
    for (std::size_t t = 0; t < s.length(); ++t)
      for (std::size_t d = 0; d < dim; ++d) st.mean[d] += s.at(t, d);
  }
  for (double& m : st.mean) m /= n;
  for (const auto& s : series)
    for (std::size_t t = 0; t < s.length(); ++t)
      for (std::size_t d = 0; d < dim; ++d) {
        const double r = s.at(t, d) - st.mean[d];
        st.sd[d] += r * r;
      }
  for (double& v : st.sd) v = std::sqrt(v / n);
  for (auto& s : series)
    for (std::size_t t = 0; t < s.length(); ++t)
      for (std::size_t d = 0; d < dim; ++d)
        s.at(t, d) = st.sd[d] > 0.0 ? (s.at(t, d) - st.mean[d]) / st.sd[d] : 0.0;
  return st;
}

void write_corpus(std::ostream& out, const std::vector<TimeSeries>& series) {
  if (series.empty()) return;
  const std::size_t dim = series.front().dim();
  out << "sequence_id,time";
  for (std::size_t d = 0; d < dim; ++d) out << ",x" << d + 1;
  out << '\n';
  for (const auto& s : series) {
    for (std::size_t t = 0; t < s.length(); ++t) {
      out << s.id() << ',' << format_double(static_cast<double>(t) / s.rate_hz());
      for (std::size_t d = 0; d < dim; ++d) out << ',' << format_double(s.at(t, d));
      out << '\n';
    }
  }
}

void write_segmentation(std::ostream& out, const std::vector<ElementSegmentation>& elements,
                        const std::vector<UnitSegmentation>& units,
                        const std::vector<std::size_t>& lengths) {
  const bool with_units = !units.empty();
  if (with_units && units.size() != elements.size())
    throw DataError("unit and element segmentations differ in sequence count");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    const std::size_t total = i < lengths.size() ? lengths[i]
                              : e.segments.empty() ? 0
                                                   : e.segments.back().end;
    check_tiling(e, total, std::numeric_limits<std::size_t>::max());
    if (with_units && !units[i].segments.empty())
      check_tiling(units[i], e.segments.size(), std::numeric_limits<std::size_t>::max());
  }
  out << "sequence_id,start,end,element_class,unit_class,unit_index\n";
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    const auto* u = with_units && !units[i].segments.empty() ? &units[i] : nullptr;
    std::size_t ui = 0;
    for (std::size_t j = 0; j < e.segments.size(); ++j) {
      const auto& s = e.segments[j];
      out << e.series_id << ',' << s.start << ',' << s.end << ',' << s.class_id << ',';
      if (u) {
        while (u->segments[ui].end <= j) ++ui;
        out << u->segments[ui].class_id << ',' << ui;
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

SegmentationTable read_segmentation(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": missing header row");
  const auto header = split_csv(line);
  const std::vector<std::string> expected = {"sequence_id", "start", "end", "element_class",
                                             "unit_class", "unit_index"};
  if (header != expected)
    throw DataError(source + ": header must be sequence_id,start,end,element_class,unit_class,unit_index");

  SegmentationTable table;
  std::map<std::string, std::size_t> index;
  bool any_units = false, any_missing_units = false;
  std::vector<long long> last_unit_index;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != expected.size())
      throw DataError(source + ": row " + std::to_string(row) + " has the wrong number of cells");
    auto [it, inserted] = index.try_emplace(cells[0], table.elements.size());
    if (inserted) {
      table.elements.push_back({cells[0], {}});
      table.units.push_back({cells[0], {}});
      last_unit_index.push_back(-1);
    }
    const std::size_t i = it->second;
    const auto start = parse_int(cells[1], where(source, row, 1, "start"));
    const auto end = parse_int(cells[2], where(source, row, 2, "end"));
    const auto cls = parse_int(cells[3], where(source, row, 3, "element_class"));
    if (start < 0 || end < 0) throw DataError(where(source, row, 1, "start") + ": negative index");
    auto& segs = table.elements[i].segments;
    segs.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end), static_cast<int>(cls)});
    if (cells[4].empty() != cells[5].empty())
      throw DataError(where(source, row, 4, "unit_class") + ": unit_class and unit_index must both be set");
    if (cells[4].empty()) {
      any_missing_units = true;
      continue;
    }
    any_units = true;
    const auto ucls = parse_int(cells[4], where(source, row, 4, "unit_class"));
    const auto uidx = parse_int(cells[5], where(source, row, 5, "unit_index"));
    auto& units = table.units[i].segments;
    const std::size_t j = segs.size() - 1;
    if (uidx == last_unit_index[i]) {
      if (units.back().class_id != ucls)
        throw DataError(where(source, row, 4, "unit_class") + ": class changes inside a unit");
      units.back().end = j + 1;
    } else {
      if (uidx != last_unit_index[i] + 1)
        throw DataError(where(source, row, 5, "unit_index") + ": unit indices must be consecutive");
      units.push_back({j, j + 1, static_cast<int>(ucls)});
      last_unit_index[i] = uidx;
    }
  }
  if (any_units && any_missing_units)
    throw DataError(source + ": unit columns are filled for some rows only");
  for (const auto& e : table.elements)
    check_tiling(e, e.segments.empty() ? 0 : e.segments.back().end,
                 std::numeric_limits<std::size_t>::max());
  if (!any_units) table.units.clear();
  return table;
}

SegmentationTable read_segmentation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_segmentation(in, path.string());
}

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "' in " + where);
}

std::string mapping_name(MappingKind k) { return k == MappingKind::Greedy ? "greedy" : "hungarian"; }

MappingKind parse_mapping(const std::string& s) {
  if (s == "greedy") return MappingKind::Greedy;
  if (s == "hungarian") return MappingKind::Hungarian;
  throw ConfigError("unknown mapping '" + s + "' (expected greedy|hungarian)");
}

}  // namespace

json to_json(const RunConfig& cfg) {
  const auto& h = cfg.hyper;
  json hyper = {
      {"C", h.num_element_classes},
      {"B", h.num_unit_classes},
      {"K", h.max_element_len},
      {"K_unit", h.max_unit_len},
      {"alpha", h.alpha},
      {"mu", h.mu},
      {"iterations", h.iterations},
      {"restarts", h.restarts},
      {"seed", h.seed},
      {"gp_cap", h.gp_cap},
      {"variance_floor", h.variance_floor},
      {"transition_smoothing", h.transition_smoothing},
      {"kernel",
       {{"theta0", h.kernel.theta0},
        {"theta1", h.kernel.theta1},
        {"theta2", h.kernel.theta2},
        {"theta3", h.kernel.theta3},
        {"phi_inv", h.kernel.phi_inv}}},
  };
  if (h.lambda_p) hyper["lambda_p"] = *h.lambda_p;
  if (h.lambda_b) hyper["lambda_b"] = *h.lambda_b;
  return {
      {"mode", std::string(to_string(cfg.mode))},
      {"mapping", mapping_name(cfg.mapping)},
      {"hyperparams", hyper},
      {"csv",
       {{"id_column", cfg.schema.id_column},
        {"time_column", cfg.schema.time_column},
        {"value_columns", cfg.schema.value_columns},
        {"rate_hz", cfg.schema.rate_hz}}},
      {"standardize", cfg.standardize},
      {"threads", cfg.threads},
      {"checkpoint_every_iteration", cfg.checkpoint_every_iteration},
      {"data", cfg.data},
      {"output", cfg.output},
  };
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j,
                 {"mode", "mapping", "hyperparams", "csv", "standardize", "threads",
                  "checkpoint_every_iteration", "data", "output"},
                 "config");
  RunConfig cfg;
  std::string mode = std::string(to_string(cfg.mode));
  std::string mapping = mapping_name(cfg.mapping);
  read_key(j, "mode", mode);
  read_key(j, "mapping", mapping);
  cfg.mode = parse_emission_mode(mode);
  cfg.mapping = parse_mapping(mapping);
  read_key(j, "standardize", cfg.standardize);
  read_key(j, "threads", cfg.threads);
  read_key(j, "checkpoint_every_iteration", cfg.checkpoint_every_iteration);
  read_key(j, "data", cfg.data);
  read_key(j, "output", cfg.output);

  if (j.contains("hyperparams")) {
    const json& hj = j.at("hyperparams");
    reject_unknown(hj,
                   {"C", "B", "K", "K_unit", "lambda_p", "lambda_b", "alpha", "mu", "iterations",
                    "restarts", "seed", "gp_cap", "variance_floor", "transition_smoothing", "kernel"},
                   "hyperparams");
    auto& h = cfg.hyper;
    read_key(hj, "C", h.num_element_classes);
    read_key(hj, "B", h.num_unit_classes);
    read_key(hj, "K", h.max_element_len);
    read_key(hj, "K_unit", h.max_unit_len);
    if (hj.contains("lambda_p") && !hj.at("lambda_p").is_null()) {
      double v = 0.0;
      read_key(hj, "lambda_p", v);
      h.lambda_p = v;
    }
    if (hj.contains("lambda_b") && !hj.at("lambda_b").is_null()) {
      double v = 0.0;
      read_key(hj, "lambda_b", v);
      h.lambda_b = v;
    }
    read_key(hj, "alpha", h.alpha);
    read_key(hj, "mu", h.mu);
    read_key(hj, "iterations", h.iterations);
    read_key(hj, "restarts", h.restarts);
    read_key(hj, "seed", h.seed);
    read_key(hj, "gp_cap", h.gp_cap);
    read_key(hj, "variance_floor", h.variance_floor);
    read_key(hj, "transition_smoothing", h.transition_smoothing);
    if (hj.contains("kernel")) {
      const json& kj = hj.at("kernel");
      reject_unknown(kj, {"theta0", "theta1", "theta2", "theta3", "phi_inv"}, "kernel");
      read_key(kj, "theta0", h.kernel.theta0);
      read_key(kj, "theta1", h.kernel.theta1);
      read_key(kj, "theta2", h.kernel.theta2);
      read_key(kj, "theta3", h.kernel.theta3);
      read_key(kj, "phi_inv", h.kernel.phi_inv);
    }
  }
  if (j.contains("csv")) {
    const json& cj = j.at("csv");
    reject_unknown(cj, {"id_column", "time_column", "value_columns", "rate_hz"}, "csv");
    read_key(cj, "id_column", cfg.schema.id_column);
    read_key(cj, "time_column", cfg.schema.time_column);
    read_key(cj, "value_columns", cfg.schema.value_columns);
    read_key(cj, "rate_hz", cfg.schema.rate_hz);
    if (!(cfg.schema.rate_hz > 0.0)) throw ConfigError("csv.rate_hz must be > 0");
  }
  validate_hyperparams(cfg.hyper);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const SynthConfig& cfg) {
  json protos = json::array();
  for (const auto& p : cfg.prototypes) {
    json waves = json::array();
    for (const auto& dim : p.waves) {
      json ws = json::array();
      for (const auto& w : dim) ws.push_back({w.amplitude, w.frequency, w.phase});
      waves.push_back(ws);
    }
    protos.push_back({{"offset", p.offset}, {"waves", waves}});
  }
  return {
      {"dim", cfg.dim},
      {"rate_hz", cfg.rate_hz},
      {"workers", cfg.workers},
      {"cycles_per_worker", cfg.cycles_per_worker},
      {"num_element_labels", cfg.num_element_labels},
      {"unit_elements", cfg.unit_elements},
      {"procedure", cfg.procedure},
      {"prototypes", protos},
      {"waves_per_dim", cfg.waves_per_dim},
      {"mean_duration", cfg.mean_duration},
      {"duration_jitter", cfg.duration_jitter},
      {"worker_speed_spread", cfg.worker_speed_spread},
      {"min_element_len", cfg.min_element_len},
      {"max_element_len", cfg.max_element_len},
      {"min_seconds", cfg.min_seconds},
      {"max_seconds", cfg.max_seconds},
      {"noise_sigma", cfg.noise_sigma},
      {"fluctuation", cfg.fluctuation},
  };
}

SynthConfig synth_config_from_json(const json& j, SynthConfig cfg) {
  reject_unknown(j,
                 {"dim", "rate_hz", "workers", "cycles_per_worker", "num_element_labels",
                  "unit_elements", "procedure", "prototypes", "waves_per_dim", "mean_duration",
                  "duration_jitter", "worker_speed_spread", "min_element_len", "max_element_len",
                  "min_seconds", "max_seconds", "noise_sigma", "fluctuation"},
                 "synth config");
  read_key(j, "dim", cfg.dim);
  read_key(j, "rate_hz", cfg.rate_hz);
  read_key(j, "workers", cfg.workers);
  read_key(j, "cycles_per_worker", cfg.cycles_per_worker);
  read_key(j, "num_element_labels", cfg.num_element_labels);
  read_key(j, "unit_elements", cfg.unit_elements);
  read_key(j, "procedure", cfg.procedure);
  read_key(j, "waves_per_dim", cfg.waves_per_dim);
  read_key(j, "mean_duration", cfg.mean_duration);
  read_key(j, "duration_jitter", cfg.duration_jitter);
  read_key(j, "worker_speed_spread", cfg.worker_speed_spread);
  read_key(j, "min_element_len", cfg.min_element_len);
  read_key(j, "max_element_len", cfg.max_element_len);
  read_key(j, "min_seconds", cfg.min_seconds);
  read_key(j, "max_seconds", cfg.max_seconds);
  read_key(j, "noise_sigma", cfg.noise_sigma);
  read_key(j, "fluctuation", cfg.fluctuation);
  if (j.contains("prototypes")) {
    cfg.prototypes.clear();
    try {
      for (const auto& pj : j.at("prototypes")) {
        Prototype p;
        p.offset = pj.at("offset").get<std::vector<double>>();
        for (const auto& dim : pj.at("waves")) {
          std::vector<Wave> ws;
          for (const auto& w : dim) ws.push_back({w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>()});
          p.waves.push_back(std::move(ws));
        }
        cfg.prototypes.push_back(std::move(p));
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("synth prototypes: ") + e.what());
    }
  }
  validate_synth_config(cfg);
  return cfg;
}

json to_json(const Checkpoint& cp) {
  json elements = json::array();
  std::map<int, json> gp_training;
  for (const auto& e : cp.elements) {
    json segs = json::array();
    for (const auto& s : e.segments) {
      segs.push_back({s.start, s.end, s.class_id});
      gp_training[s.class_id].push_back({e.series_id, s.start, s.end});
    }
    elements.push_back({{"series_id", e.series_id}, {"segments", segs}});
  }
  json units = json::array();
  for (const auto& u : cp.units) {
    json segs = json::array();
    for (const auto& s : u.segments) segs.push_back({s.start, s.end, s.class_id});
    units.push_back({{"series_id", u.series_id}, {"segments", segs}});
  }
  json gp = json::object();
  for (auto& [c, refs] : gp_training) gp[std::to_string(c)] = refs;

  json out = {
      {"version", Checkpoint::kVersion},
      {"mode", std::string(to_string(cp.mode))},
      {"seed", cp.seed},
      {"iteration", cp.iteration},
      {"trace", cp.trace},
      {"prior_uniform", cp.prior_uniform},
      {"elements", elements},
      {"units", units},
      {"gp_training_segments", gp},
  };

  if (!cp.units.empty()) {
    int max_e = 0, max_u = 0;
    for (const auto& e : cp.elements)
      for (const auto& s : e.segments) max_e = std::max(max_e, s.class_id);
    for (const auto& u : cp.units)
      for (const auto& s : u.segments) max_u = std::max(max_u, s.class_id);
    std::vector<std::vector<int>> strings;
    for (const auto& e : cp.elements) strings.push_back(e.classes());
    const auto counts = update_counts(static_cast<std::size_t>(max_e) + 1,
                                      static_cast<std::size_t>(max_u) + 1, strings, cp.units);
    json ws = json::array();
    for (const auto& [key, n] : counts.strings()) ws.push_back({{"elements", key}, {"count", n}});
    json unigram = json::array();
    json begin = json::array();
    json end = json::array();
    for (std::size_t b = 0; b < counts.num_units(); ++b) {
      std::vector<double> ur, br, er;
      for (std::size_t c = 0; c < counts.num_elements(); ++c) {
        ur.push_back(counts.unit_element(b, c));
        br.push_back(counts.count_begin(c, b));
        er.push_back(counts.count_end(c, b));
      }
      unigram.push_back(ur);
      begin.push_back(br);
      end.push_back(er);
    }
    out["emission_counts"] = {{"unit_strings", ws}, {"unigram", unigram}, {"begin", begin}, {"end", end}};
  }
  return out;
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    Checkpoint cp;
    const int version = j.at("version").get<int>();
    if (version != Checkpoint::kVersion)
      throw DataError("unsupported checkpoint version " + std::to_string(version));
    cp.mode = parse_emission_mode(j.at("mode").get<std::string>());
    cp.seed = j.at("seed").get<std::uint64_t>();
    cp.iteration = j.at("iteration").get<int>();
    cp.trace = j.at("trace").get<std::vector<double>>();
    cp.prior_uniform = j.at("prior_uniform").get<bool>();
    for (const auto& ej : j.at("elements")) {
      ElementSegmentation e{ej.at("series_id").get<std::string>(), {}};
      for (const auto& s : ej.at("segments"))
        e.segments.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<int>()});
      cp.elements.push_back(std::move(e));
    }
    for (const auto& uj : j.at("units")) {
      UnitSegmentation u{uj.at("series_id").get<std::string>(), {}};
      for (const auto& s : uj.at("segments"))
        u.segments.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<int>()});
      cp.units.push_back(std::move(u));
    }
    return cp;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp);
    out << text;
    if (!out) throw DataError("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace gphsmm
