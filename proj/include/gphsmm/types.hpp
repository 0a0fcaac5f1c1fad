#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gphsmm {

/// One observed multivariate trajectory, stored row-major (sample-by-sample).
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::string id, std::size_t dim, std::vector<double> data, double rate_hz = 5.0);

  const std::string& id() const { return id_; }
  double rate_hz() const { return rate_hz_; }
  std::size_t dim() const { return dim_; }
  std::size_t length() const { return dim_ == 0 ? 0 : data_.size() / dim_; }

  std::span<const double> sample(std::size_t t) const {
    return {data_.data() + t * dim_, dim_};
  }
  double at(std::size_t t, std::size_t d) const { return data_[t * dim_ + d]; }
  double& at(std::size_t t, std::size_t d) { return data_[t * dim_ + d]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::string id_;
  std::size_t dim_ = 0;
  double rate_hz_ = 5.0;
  std::vector<double> data_;
};

/// Half-open span [start, end) of samples labelled with a motion-element class.
struct ElementSegment {
  std::size_t start = 0;
  std::size_t end = 0;
  int class_id = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const ElementSegment&, const ElementSegment&) = default;
};

struct ElementSegmentation {
  std::string series_id;
  std::vector<ElementSegment> segments;

  std::vector<int> classes() const;
  friend bool operator==(const ElementSegmentation&, const ElementSegmentation&) = default;
};

/// Half-open span [start, end) of element indices labelled with a unit-motion class.
struct UnitSegment {
  std::size_t start = 0;
  std::size_t end = 0;
  int class_id = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const UnitSegment&, const UnitSegment&) = default;
};

struct UnitSegmentation {
  std::string series_id;
  std::vector<UnitSegment> segments;

  friend bool operator==(const UnitSegmentation&, const UnitSegmentation&) = default;
};

struct KernelParams {
  double theta0 = 1.0;
  double theta1 = 1.0;
  double theta2 = 0.0;
  double theta3 = 16.0;
  double phi_inv = 0.1;  // observation-noise variance

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// Upper-layer emission formulation, or the plain GP-HSMM baseline.
enum class EmissionMode { WordSegmentation, MotionUnigram, MotionBigram, LowerOnly };

std::string_view to_string(EmissionMode mode);
EmissionMode parse_emission_mode(std::string_view text);

struct Hyperparams {
  int num_element_classes = 12;  // C
  int num_unit_classes = 8;      // B
  int max_element_len = 50;      // K, in samples
  int max_unit_len = 10;         // K', in elements
  // Unset means half the corresponding maximum length.
  std::optional<double> lambda_p;
  std::optional<double> lambda_b;
  double alpha = 10.0;
  double mu = 0.1;
  KernelParams kernel;
  int iterations = 30;  // M
  int restarts = 10;
  std::uint64_t seed = 1;

  int gp_cap = 200;
  double variance_floor = 1e-8;
  double transition_smoothing = 0.1;

  double element_duration_mean() const { return lambda_p.value_or(max_element_len / 2.0); }
  double unit_duration_mean() const { return lambda_b.value_or(max_unit_len / 2.0); }

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Returns `h` unchanged, or throws ConfigError naming the first offending field.
Hyperparams validate_hyperparams(const Hyperparams& h);

/// Throws DataError unless `seg` tiles [0, length) with segments no longer than max_len.
void check_tiling(const ElementSegmentation& seg, std::size_t length, std::size_t max_len);
void check_tiling(const UnitSegmentation& seg, std::size_t num_elements, std::size_t max_len);

}  // namespace gphsmm
