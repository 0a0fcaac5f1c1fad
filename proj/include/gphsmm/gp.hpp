#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gphsmm/rng.hpp"
#include "gphsmm/types.hpp"

namespace gphsmm {

/// theta0 * exp(-theta1/2 * |p-q|^2) + theta2 + theta3 * p * q
double kernel_eval(double p, double q, const KernelParams& k);

/// Gram matrix of kernel_eval over `ts` with phi_inv added on the diagonal.
Eigen::MatrixXd covariance_matrix(std::span<const double> ts, const KernelParams& k);

/// Lower Cholesky factor of `a`. Throws NumericError naming the order of the first
/// leading minor that is not positive definite.
Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& a);

struct Prediction {
  double mean = 0.0;
  double var = 0.0;
};

/// GP posterior over D independent output dimensions sharing one set of inputs.
///
/// Observations that share an input are collapsed into their mean with the noise
/// variance divided by the multiplicity. This is an exact rewrite of the dense
/// posterior, so the factorized system has one row per distinct input.
class GpPosterior {
 public:
  GpPosterior() = default;
  /// `values` is row-major: values[i * dim + d] is the d-th output at ts[i].
  GpPosterior(std::span<const double> ts, std::span<const double> values, std::size_t dim,
              const KernelParams& kernel, double variance_floor = 1e-8);

  Prediction predict(double t_hat, std::size_t d) const;
  /// Predictions for every dimension at once; `out` has one slot per dimension.
  void predict_all(double t_hat, std::span<Prediction> out) const;
  std::size_t distinct_inputs() const { return inputs_.size(); }

 private:
  KernelParams kernel_;
  double floor_ = 1e-8;
  std::size_t dim_ = 0;
  std::vector<double> inputs_;
  Eigen::MatrixXd chol_;     // lower factor of the grouped covariance
  Eigen::MatrixXd weights_;  // C^{-1} * mean outputs, one column per dimension
};

/// Per-timestep predictive Gaussians for timesteps 0..max_len-1, used to score
/// every candidate segment of a series without re-solving the GP.
class PredictiveTable {
 public:
  PredictiveTable() = default;
  PredictiveTable(std::size_t max_len, std::size_t dim)
      : max_len_(max_len), dim_(dim), mean_(max_len * dim), inv_var_(max_len * dim),
        log_norm_(max_len * dim) {}

  void set(std::size_t t, std::size_t d, Prediction p);
  double point_loglik(std::size_t t, std::size_t d, double x) const {
    const std::size_t i = t * dim_ + d;
    const double r = x - mean_[i];
    return log_norm_[i] - 0.5 * r * r * inv_var_[i];
  }
  /// Sum over dimensions of point_loglik for one sample.
  double sample_loglik(std::size_t t, std::span<const double> x) const {
    const std::size_t base = t * dim_;
    double acc = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double r = x[d] - mean_[base + d];
      acc += log_norm_[base + d] - 0.5 * r * r * inv_var_[base + d];
    }
    return acc;
  }
  std::size_t max_len() const { return max_len_; }
  std::size_t dim() const { return dim_; }

 private:
  std::size_t max_len_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> mean_, inv_var_, log_norm_;
};

/// Training set and posterior for one motion-element class.
///
/// Training points are pooled from every segment assigned to the class, with the
/// input restarting at 0 for each segment. When the pool exceeds `cap` points it is
/// uniformly subsampled with the model's own RNG on each rebuild.
///
/// Mutators mark the posterior stale; const queries rebuild it lazily. Call
/// refresh() before sharing a model across threads.
class GpClassModel {
 public:
  GpClassModel(std::size_t dim, KernelParams kernel, std::size_t cap = 200,
               double variance_floor = 1e-8, std::uint64_t seed = 1);

  /// `x` is a row-major block of samples of this model's dimension.
  void add_segment(std::span<const double> x);
  /// Throws std::logic_error if no identical segment was added before.
  void remove_segment(std::span<const double> x);
  void clear();

  std::size_t dim() const { return dim_; }
  std::size_t num_segments() const { return segments_.size(); }
  std::size_t pooled_size() const { return pooled_; }
  /// Points per dimension actually conditioned on (after the cap).
  std::size_t training_size() const;
  const KernelParams& kernel() const { return kernel_; }
  const std::vector<std::vector<double>>& segments() const { return segments_; }

  void refresh() const;
  bool stale() const { return stale_; }

  Prediction predict(double t_hat, std::size_t d) const;
  double segment_loglik(std::span<const double> x) const;
  PredictiveTable predictive_table(std::size_t max_len) const;

 private:
  std::size_t dim_;
  KernelParams kernel_;
  std::size_t cap_;
  double floor_;
  std::vector<std::vector<double>> segments_;
  std::size_t pooled_ = 0;

  mutable Rng rng_;
  mutable bool stale_ = true;
  mutable std::size_t retained_ = 0;
  mutable GpPosterior posterior_;
};

/// Row-major view of samples [start, end) of a series.
inline std::span<const double> segment_span(const TimeSeries& s, std::size_t start, std::size_t end) {
  return std::span<const double>(s.data()).subspan(start * s.dim(), (end - start) * s.dim());
}

}  // namespace gphsmm
