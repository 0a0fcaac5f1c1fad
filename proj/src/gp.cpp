#include "gphsmm/gp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gphsmm/errors.hpp"

namespace gphsmm {

double kernel_eval(double p, double q, const KernelParams& k) {
  const double d = p - q;
  return k.theta0 * std::exp(-0.5 * k.theta1 * d * d) + k.theta2 + k.theta3 * (p * q);
}

Eigen::MatrixXd covariance_matrix(std::span<const double> ts, const KernelParams& k) {
  const auto n = static_cast<Eigen::Index>(ts.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q <= p; ++q) {
      const double v = kernel_eval(ts[p], ts[q], k);
      c(p, q) = v;
      c(q, p) = v;
    }
    c(p, p) += k.phi_inv;
  }
  return c;
}

Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  for (Eigen::Index n = 1; n <= a.rows(); ++n) {
    Eigen::LLT<Eigen::MatrixXd> lead(a.topLeftCorner(n, n));
    if (lead.info() != Eigen::Success) {
      std::ostringstream os;
      os << "covariance factorization failed: leading minor of order " << n
         << " is not positive definite (degenerate kernel parameters?)";
      throw NumericError(os.str());
    }
  }
  throw NumericError("covariance factorization failed");
}

GpPosterior::GpPosterior(std::span<const double> ts, std::span<const double> values,
                         std::size_t dim, const KernelParams& kernel, double variance_floor)
    : kernel_(kernel), floor_(variance_floor), dim_(dim) {
  if (values.size() != ts.size() * dim)
    throw std::invalid_argument("GpPosterior: values/timesteps size mismatch");
  if (ts.empty()) return;

  std::map<double, std::size_t> slot;
  std::vector<std::size_t> counts;
  std::vector<double> sums;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(ts[i], inputs_.size());
    if (inserted) {
      inputs_.push_back(ts[i]);
      counts.push_back(0);
      sums.resize(sums.size() + dim, 0.0);
    }
    const std::size_t g = it->second;
    ++counts[g];
    for (std::size_t d = 0; d < dim; ++d) sums[g * dim + d] += values[i * dim + d];
  }

  const auto m = static_cast<Eigen::Index>(inputs_.size());
  Eigen::MatrixXd c = covariance_matrix(inputs_, kernel_);
  Eigen::MatrixXd means(m, static_cast<Eigen::Index>(dim));
  for (Eigen::Index g = 0; g < m; ++g) {
    const double n = static_cast<double>(counts[g]);
    c(g, g) += kernel_.phi_inv / n - kernel_.phi_inv;
    for (std::size_t d = 0; d < dim; ++d) means(g, static_cast<Eigen::Index>(d)) = sums[g * dim + d] / n;
  }
  chol_ = checked_cholesky(c);
  const auto lower = chol_.triangularView<Eigen::Lower>();
  weights_ = lower.solve(means);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(weights_);
}

Prediction GpPosterior::predict(double t_hat, std::size_t d) const {
  const double prior = kernel_eval(t_hat, t_hat, kernel_);
  if (inputs_.empty()) return {0.0, std::max(prior, floor_)};
  const auto m = static_cast<Eigen::Index>(inputs_.size());
  Eigen::VectorXd k(m);
  for (Eigen::Index i = 0; i < m; ++i) k(i) = kernel_eval(inputs_[i], t_hat, kernel_);
  const double mean = k.dot(weights_.col(static_cast<Eigen::Index>(d)));
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  return {mean, std::max(prior - v.squaredNorm(), floor_)};
}

void GpPosterior::predict_all(double t_hat, std::span<Prediction> out) const {
  const double prior = kernel_eval(t_hat, t_hat, kernel_);
  if (inputs_.empty()) {
    for (auto& p : out) p = {0.0, std::max(prior, floor_)};
    return;
  }
  const auto m = static_cast<Eigen::Index>(inputs_.size());
  Eigen::VectorXd k(m);
  for (Eigen::Index i = 0; i < m; ++i) k(i) = kernel_eval(inputs_[i], t_hat, kernel_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(prior - v.squaredNorm(), floor_);
  for (std::size_t d = 0; d < out.size(); ++d)
    out[d] = {k.dot(weights_.col(static_cast<Eigen::Index>(d))), var};
}

void PredictiveTable::set(std::size_t t, std::size_t d, Prediction p) {
  const std::size_t i = t * dim_ + d;
  mean_[i] = p.mean;
  inv_var_[i] = 1.0 / p.var;
  log_norm_[i] = -0.5 * std::log(2.0 * std::numbers::pi * p.var);
}

GpClassModel::GpClassModel(std::size_t dim, KernelParams kernel, std::size_t cap,
                           double variance_floor, std::uint64_t seed)
    : dim_(dim), kernel_(kernel), cap_(cap), floor_(variance_floor), rng_(seed) {
  if (dim_ == 0) throw std::invalid_argument("GpClassModel: dimension must be >= 1");
  if (cap_ == 0) throw std::invalid_argument("GpClassModel: cap must be >= 1");
}

void GpClassModel::add_segment(std::span<const double> x) {
  if (x.empty() || x.size() % dim_ != 0)
    throw std::invalid_argument("GpClassModel::add_segment: malformed segment");
  segments_.emplace_back(x.begin(), x.end());
  pooled_ += x.size() / dim_;
  stale_ = true;
}

void GpClassModel::remove_segment(std::span<const double> x) {
  auto it = std::find_if(segments_.begin(), segments_.end(), [&](const std::vector<double>& s) {
    return s.size() == x.size() && std::equal(s.begin(), s.end(), x.begin());
  });
  if (it == segments_.end())
    throw std::logic_error("GpClassModel::remove_segment: segment was never added");
  pooled_ -= x.size() / dim_;
  segments_.erase(it);
  stale_ = true;
}

void GpClassModel::clear() {
  segments_.clear();
  pooled_ = 0;
  stale_ = true;
}

std::size_t GpClassModel::training_size() const {
  refresh();
  return retained_;
}

void GpClassModel::refresh() const {
  if (!stale_) return;
  std::vector<double> ts;
  std::vector<double> values;
  ts.reserve(pooled_);
  values.reserve(pooled_ * dim_);
  for (const auto& s : segments_) {
    const std::size_t len = s.size() / dim_;
    for (std::size_t t = 0; t < len; ++t) ts.push_back(static_cast<double>(t));
    values.insert(values.end(), s.begin(), s.end());
  }
  if (ts.size() > cap_) {
    // partial Fisher-Yates: the first cap_ entries of `order` are a uniform subset
    std::vector<std::size_t> order(ts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < cap_; ++i) std::swap(order[i], order[i + rng_.index(order.size() - i)]);
    order.resize(cap_);
    std::sort(order.begin(), order.end());
    std::vector<double> sub_ts;
    std::vector<double> sub_values;
    sub_ts.reserve(cap_);
    sub_values.reserve(cap_ * dim_);
    for (std::size_t i : order) {
      sub_ts.push_back(ts[i]);
      sub_values.insert(sub_values.end(), values.begin() + i * dim_, values.begin() + (i + 1) * dim_);
    }
    ts.swap(sub_ts);
    values.swap(sub_values);
  }
  retained_ = ts.size();
  posterior_ = GpPosterior(ts, values, dim_, kernel_, floor_);
  stale_ = false;
}

Prediction GpClassModel::predict(double t_hat, std::size_t d) const {
  refresh();
  return posterior_.predict(t_hat, d);
}

double GpClassModel::segment_loglik(std::span<const double> x) const {
  refresh();
  const std::size_t len = x.size() / dim_;
  double total = 0.0;
  std::vector<Prediction> row(dim_);
  for (std::size_t t = 0; t < len; ++t) {
    posterior_.predict_all(static_cast<double>(t), row);
    for (std::size_t d = 0; d < dim_; ++d) {
      const Prediction& p = row[d];
      const double r = x[t * dim_ + d] - p.mean;
      total += -0.5 * std::log(2.0 * std::numbers::pi * p.var) - 0.5 * r * r / p.var;
    }
  }
  return total;
}

PredictiveTable GpClassModel::predictive_table(std::size_t max_len) const {
  refresh();
  PredictiveTable table(max_len, dim_);
  std::vector<Prediction> row(dim_);
  for (std::size_t t = 0; t < max_len; ++t) {
    posterior_.predict_all(static_cast<double>(t), row);
    for (std::size_t d = 0; d < dim_; ++d) table.set(t, d, row[d]);
  }
  return table;
}

}  // namespace gphsmm
