#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gphsmm/errors.hpp"
#include "gphsmm/gp.hpp"
#include "oracles.hpp"

using namespace gphsmm;

namespace {

const KernelParams kDefault{};

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("kernel values") {
  CHECK(kernel_eval(0, 0, kDefault) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kernel_eval(1, 1, kDefault) == doctest::Approx(17.0).epsilon(1e-15));
  CHECK(kernel_eval(0, 3, kDefault) == doctest::Approx(std::exp(-4.5)).epsilon(1e-15));
}

TEST_CASE("kernel is symmetric") {
  Rng rng(1);
  KernelParams k{0.7, 2.3, 0.4, 3.0, 0.1};
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform() * 40 - 20, q = rng.uniform() * 40 - 20;
    CHECK(kernel_eval(p, q, k) == kernel_eval(q, p, k));
  }
}

TEST_CASE("covariance matrix") {
  const std::vector<double> one = {0.0};
  const auto c1 = covariance_matrix(one, kDefault);
  CHECK(c1.rows() == 1);
  CHECK(c1(0, 0) == doctest::Approx(1.1).epsilon(1e-15));

  const std::vector<double> two = {0.0, 1.0};
  const auto c2 = covariance_matrix(two, kDefault);
  CHECK(c2(0, 1) == doctest::Approx(kernel_eval(0, 1, kDefault)).epsilon(1e-15));
  CHECK(c2(1, 0) == c2(0, 1));
  CHECK(c2(1, 1) == doctest::Approx(17.1).epsilon(1e-15));

  Rng rng(2);
  std::vector<double> ts;
  for (int i = 0; i < 30; ++i) ts.push_back(static_cast<double>(i) + rng.uniform() * 0.5);
  const auto c = covariance_matrix(ts, kDefault);
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_NOTHROW(checked_cholesky(c));
}

TEST_CASE("failed factorization names the leading minor") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 0, 0, 0, 1, 2, 0, 2, 1;
  try {
    checked_cholesky(a);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("leading minor of order 3") != std::string::npos);
  }
}

TEST_CASE("prediction closed forms") {
  GpClassModel empty(1, kDefault);
  const auto p0 = empty.predict(0.0, 0);
  CHECK(p0.mean == 0.0);
  CHECK(p0.var == doctest::Approx(1.0));

  GpClassModel one(1, kDefault);
  const std::vector<double> x = {2.0};
  one.add_segment(x);
  const auto p = one.predict(0.0, 0);
  CHECK(p.mean == doctest::Approx(2.0 / 1.1).epsilon(1e-14));
  CHECK(p.var == doctest::Approx(1.0 - 1.0 / 1.1).epsilon(1e-12));
  CHECK(p.var < empty.predict(0.0, 0).var);
}

TEST_CASE("posterior contracts at training inputs") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    GpClassModel m(1, kDefault);
    std::vector<double> x(10);
    for (auto& v : x) v = rng.normal();
    m.add_segment(x);
    for (int t = 0; t < 10; ++t) CHECK(m.predict(t, 0).var < kernel_eval(t, t, kDefault));
  }
}

TEST_CASE("segment log-likelihood") {
  GpClassModel empty(1, kDefault);
  const std::vector<double> zero = {0.0};
  CHECK(empty.segment_loglik(zero) == doctest::Approx(-0.5 * std::log(2 * M_PI)).epsilon(1e-14));

  GpClassModel m(1, kDefault);
  const std::vector<double> seg = {0.5, 1.0, 1.4, 1.6, 1.5};
  std::vector<double> flipped;
  for (double v : seg) flipped.push_back(-v);
  m.add_segment(seg);
  CHECK(m.segment_loglik(seg) > m.segment_loglik(flipped));

  // two dimensions score as the sum of the per-dimension models
  GpClassModel a(1, kDefault), b(1, kDefault), ab(2, kDefault);
  const std::vector<double> xa = {0.1, 0.3, 0.2}, xb = {-1.0, -0.5, 0.7};
  const std::vector<double> xab = {0.1, -1.0, 0.3, -0.5, 0.2, 0.7};
  a.add_segment(xa);
  b.add_segment(xb);
  ab.add_segment(xab);
  const std::vector<double> qa = {0.0, 0.2, 0.4}, qb = {-0.8, -0.2, 0.5};
  const std::vector<double> qab = {0.0, -0.8, 0.2, -0.2, 0.4, 0.5};
  CHECK(ab.segment_loglik(qab) == doctest::Approx(a.segment_loglik(qa) + b.segment_loglik(qb)).epsilon(1e-12));

  // per-point Gaussian densities under the dense oracle
  oracle::Kernel ok;
  const std::vector<double> ts = {0, 1, 2, 3, 4};
  double expect = 0.0;
  const std::vector<double> q = {0.4, 0.9, 1.5, 1.5, 1.2};
  for (int t = 0; t < 5; ++t) {
    const auto [mean, var] = oracle::gp_predict(ok, ts, seg, t);
    expect += oracle::gauss_logpdf(q[t], mean, std::max(var, 1e-8));
  }
  CHECK(m.segment_loglik(q) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("add and remove bookkeeping") {
  GpClassModel m(2, kDefault);
  const std::vector<double> s1 = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  m.add_segment(s1);
  CHECK(m.training_size() == 5);
  const std::vector<double> probe = {0.3, 0.1, 0.2, 0.2};
  const double before = m.segment_loglik(probe);
  const std::vector<double> s2 = {1, 1, 2, 2};
  m.add_segment(s2);
  CHECK(m.segment_loglik(probe) != before);
  m.remove_segment(s2);
  CHECK(m.segment_loglik(probe) == before);
  CHECK_THROWS_AS(m.remove_segment(s2), std::logic_error);
}

TEST_CASE("training set cap") {
  GpClassModel m(1, kDefault, 100, 1e-8, 7);
  Rng rng(8);
  for (int s = 0; s < 30; ++s) {
    std::vector<double> x(10);
    for (auto& v : x) v = rng.normal();
    m.add_segment(x);
  }
  CHECK(m.pooled_size() == 300);
  CHECK(m.training_size() == 100);
}

TEST_CASE("log-likelihood does not depend on insertion order") {
  Rng rng(12);
  std::vector<std::vector<double>> segs;
  for (int s = 0; s < 6; ++s) {
    std::vector<double> x(2 * (3 + rng.index(5)));
    for (auto& v : x) v = rng.normal();
    segs.push_back(x);
  }
  GpClassModel fwd(2, kDefault), rev(2, kDefault);
  for (const auto& s : segs) fwd.add_segment(s);
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) rev.add_segment(*it);
  const std::vector<double> probe = {0.1, 0.2, -0.3, 0.4, 0.5, 0.0};
  CHECK(fwd.segment_loglik(probe) == doctest::Approx(rev.segment_loglik(probe)).epsilon(1e-10));
}

TEST_CASE("posterior matches the dense oracle including repeated inputs") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    KernelParams k{0.5 + rng.uniform(), 0.2 + rng.uniform(), rng.uniform() * 0.5, rng.uniform() * 4, 0.05 + rng.uniform() * 0.3};
    oracle::Kernel ok{k.theta0, k.theta1, k.theta2, k.theta3, k.phi_inv};
    const std::size_t n = 1 + rng.index(40);
    std::vector<double> ts(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) {
      ts[i] = static_cast<double>(rng.index(12));
      xs[i] = rng.normal();
    }
    const GpPosterior post(ts, xs, 1, k, 0.0);
    for (double t_hat : {0.0, 1.0, 3.5, 7.0, 11.0}) {
      const auto [mean, var] = oracle::gp_predict(ok, ts, xs, t_hat);
      const auto p = post.predict(t_hat, 0);
      CHECK(rel_err(p.mean, mean) < 1e-8);
      CHECK(rel_err(p.var, var) < 1e-8);
    }
  }
}
