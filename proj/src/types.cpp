#include "gphsmm/types.hpp"

#include <cmath>
#include <sstream>

#include "gphsmm/errors.hpp"

namespace gphsmm {

TimeSeries::TimeSeries(std::string id, std::size_t dim, std::vector<double> data, double rate_hz)
    : id_(std::move(id)), dim_(dim), rate_hz_(rate_hz), data_(std::move(data)) {
  if (dim_ == 0) throw DataError("series '" + id_ + "': dimension must be >= 1");
  if (data_.empty()) throw DataError("series '" + id_ + "' is empty");
  if (data_.size() % dim_ != 0)
    throw DataError("series '" + id_ + "': data size is not a multiple of the dimension");
  if (!(rate_hz_ > 0.0)) throw DataError("series '" + id_ + "': rate must be positive");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      std::ostringstream os;
      os << "series '" << id_ << "': non-finite value at sample " << i / dim_ << ", dimension "
         << i % dim_;
      throw DataError(os.str());
    }
  }
}

std::vector<int> ElementSegmentation::classes() const {
  std::vector<int> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.class_id);
  return out;
}

std::string_view to_string(EmissionMode mode) {
  switch (mode) {
    case EmissionMode::WordSegmentation: return "ws";
    case EmissionMode::MotionUnigram: return "meu";
    case EmissionMode::MotionBigram: return "meb";
    case EmissionMode::LowerOnly: return "lower-only";
  }
  return "?";
}

EmissionMode parse_emission_mode(std::string_view text) {
  if (text == "ws") return EmissionMode::WordSegmentation;
  if (text == "meu") return EmissionMode::MotionUnigram;
  if (text == "meb") return EmissionMode::MotionBigram;
  if (text == "lower-only") return EmissionMode::LowerOnly;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected ws|meu|meb|lower-only)");
}

Hyperparams validate_hyperparams(const Hyperparams& h) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (h.num_element_classes < 1) fail("C must be ≥ 1");
  if (h.num_unit_classes < 1) fail("B must be ≥ 1");
  if (h.max_element_len < 1) fail("K must be ≥ 1");
  if (h.max_unit_len < 1) fail("K' must be ≥ 1");
  if (h.lambda_p && !(*h.lambda_p > 0.0)) fail("lambda_p must be > 0");
  if (h.lambda_b && !(*h.lambda_b > 0.0)) fail("lambda_b must be > 0");
  if (!(h.alpha > 0.0)) fail("alpha must be > 0");
  if (!(h.mu > 0.0)) fail("mu must be > 0");
  if (!(h.kernel.theta0 >= 0.0)) fail("theta0 must be ≥ 0");
  if (!(h.kernel.theta1 >= 0.0)) fail("theta1 must be ≥ 0");
  if (!std::isfinite(h.kernel.theta2)) fail("theta2 must be finite");
  if (!std::isfinite(h.kernel.theta3)) fail("theta3 must be finite");
  if (!(h.kernel.phi_inv > 0.0)) fail("phi_inv must be > 0");
  if (h.iterations < 1) fail("iterations must be ≥ 1");
  if (h.restarts < 1) fail("restarts must be ≥ 1");
  if (h.gp_cap < 1) fail("gp_cap must be ≥ 1");
  if (!(h.variance_floor > 0.0)) fail("variance_floor must be > 0");
  if (!(h.transition_smoothing > 0.0)) fail("transition_smoothing must be > 0");
  return h;
}

namespace {

template <typename Seg>
void check_spans(const std::string& what, const std::string& id, const std::vector<Seg>& segs,
                 std::size_t total, std::size_t max_len, int max_class) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    std::ostringstream os;
    os << what << " '" << id << "' segment " << i << ": ";
    if (s.start != pos) {
      os << "starts at " << s.start << ", expected " << pos;
      throw DataError(os.str());
    }
    if (s.end <= s.start || s.end - s.start > max_len) {
      os << "length " << (s.end > s.start ? s.end - s.start : 0) << " outside [1, " << max_len
         << "]";
      throw DataError(os.str());
    }
    if (s.class_id < 0 || (max_class >= 0 && s.class_id >= max_class)) {
      os << "class " << s.class_id << " out of range";
      throw DataError(os.str());
    }
    pos = s.end;
  }
  if (pos != total) {
    std::ostringstream os;
    os << what << " '" << id << "' covers [0, " << pos << ") but length is " << total;
    throw DataError(os.str());
  }
}

}  // namespace

void check_tiling(const ElementSegmentation& seg, std::size_t length, std::size_t max_len) {
  check_spans("element segmentation", seg.series_id, seg.segments, length, max_len, -1);
}

void check_tiling(const UnitSegmentation& seg, std::size_t num_elements, std::size_t max_len) {
  check_spans("unit segmentation", seg.series_id, seg.segments, num_elements, max_len, -1);
}

}  // namespace gphsmm
