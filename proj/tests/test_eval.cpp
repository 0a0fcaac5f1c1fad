#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gphsmm/eval.hpp"
#include "gphsmm/report.hpp"
#include "gphsmm/rng.hpp"
#include "oracles.hpp"

using namespace gphsmm;

namespace {

std::vector<int> random_seq(Rng& rng, std::size_t max_len, std::size_t alphabet) {
  std::vector<int> v(rng.index(max_len + 1));
  for (auto& x : v) x = static_cast<int>(rng.index(alphabet));
  return v;
}

std::vector<LabeledSpan> spans(const std::vector<int>& labels, std::size_t width = 3) {
  std::vector<LabeledSpan> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({i * width, (i + 1) * width, labels[i]});
  return out;
}

}  // namespace

TEST_CASE("levenshtein examples") {
  const std::vector<int> a = {1, 2, 3}, b = {1, 3}, empty;
  CHECK(levenshtein(a, a) == 0);
  CHECK(levenshtein(a, b) == 1);
  CHECK(levenshtein(empty, a) == 3);
  CHECK(nld(a, a) == 0.0);
  CHECK(nld(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(nld(empty, empty) == 0.0);
  const std::vector<int> x = {1, 2, 3, 4}, y = {5, 6, 7, 8};
  CHECK(nld(x, y) == 1.0);
}

TEST_CASE("levenshtein is a metric that agrees with the full-matrix recurrence") {
  Rng rng(123);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_seq(rng, 12, 4), b = random_seq(rng, 12, 4), c = random_seq(rng, 12, 4);
    const auto ab = levenshtein(a, b);
    CHECK(ab == oracle::edit_distance(a, b));
    CHECK(ab == levenshtein(b, a));
    CHECK((ab == 0) == (a == b));
    CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));
    const double d = nld(a, b);
    CHECK((d >= 0.0 && d <= 1.0));
  }
}

TEST_CASE("class mapping") {
  const std::vector<std::vector<LabeledSpan>> truth = {spans({0, 1, 2, 1, 0})};
  const std::vector<std::vector<LabeledSpan>> est = {spans({7, 4, 9, 4, 7})};
  for (auto kind : {MappingKind::Greedy, MappingKind::Hungarian}) {
    const auto score = score_segments(est, truth, kind);
    CHECK(score.mean_nld == 0.0);
    CHECK(score.distinct_labels == 3);
  }

  // one estimated class over a two-label truth maps to the majority label
  const std::vector<std::vector<LabeledSpan>> t2 = {{{0, 10, 0}, {10, 14, 1}}};
  const std::vector<std::vector<LabeledSpan>> e2 = {{{0, 14, 5}}};
  const auto m = class_mapping(e2, t2);
  CHECK(m.at(5) == 0);

  // hungarian keeps the assignment one-to-one
  const std::vector<std::vector<LabeledSpan>> t3 = {{{0, 10, 0}, {10, 16, 1}}};
  const std::vector<std::vector<LabeledSpan>> e3 = {{{0, 8, 2}, {8, 16, 3}}};
  const auto g = class_mapping(e3, t3, MappingKind::Greedy);
  const auto h = class_mapping(e3, t3, MappingKind::Hungarian);
  CHECK(g.at(2) == 0);
  CHECK(h.at(2) == 0);
  CHECK(h.at(3) == 1);
}

TEST_CASE("scores are invariant to relabeling the estimate") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<LabeledSpan>> truth, est, perm;
    std::vector<int> p = {0, 1, 2, 3, 4, 5};
    std::shuffle(p.begin(), p.end(), rng);
    for (int s = 0; s < 4; ++s) {
      auto t = random_seq(rng, 10, 4);
      auto e = random_seq(rng, 10, 6);
      if (t.empty()) t.push_back(0);
      if (e.empty()) e.push_back(1);
      truth.push_back(spans(t, 5));
      auto es = spans(e, static_cast<std::size_t>(5 * t.size()) / e.size() + 1);
      est.push_back(es);
      for (auto& x : es) x.label = p[static_cast<std::size_t>(x.label)];
      perm.push_back(es);
    }
    CHECK(score_segments(est, truth).mean_nld == score_segments(perm, truth).mean_nld);
  }
}

TEST_CASE("random labels score worse than the truth") {
  Rng rng(2);
  std::vector<std::vector<LabeledSpan>> truth, est;
  for (int s = 0; s < 20; ++s) {
    std::vector<int> t(12), e(12);
    for (int i = 0; i < 12; ++i) t[static_cast<std::size_t>(i)] = i % 6;
    for (auto& x : e) x = static_cast<int>(rng.index(6));
    truth.push_back(spans(t));
    est.push_back(spans(e));
  }
  CHECK(score_segments(est, truth).mean_nld > 0.2);
  CHECK(score_segments(truth, truth).mean_nld == 0.0);
}

TEST_CASE("unit spans and string types") {
  const ElementSegmentation e{"s", {{0, 2, 1}, {2, 5, 2}, {5, 6, 1}, {6, 8, 2}}};
  const UnitSegmentation u{"s", {{0, 2, 0}, {2, 4, 0}}};
  const auto plain = unit_spans(e, u);
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].start == 0);
  CHECK(plain[0].end == 5);
  CHECK(plain[1].end == 8);
  StringTypes types;
  const auto typed = unit_spans(e, u, &types);
  CHECK(typed[0].label == typed[1].label);
  CHECK(types.size() == 1);
}

TEST_CASE("report tables") {
  MethodResult r;
  r.method = "meu";
  r.element_nld = {0.4};
  r.unit_nld = {0.2};
  r.distinct_units = {3};
  r.log_likelihood = {-5};
  const std::vector<MethodResult> one = {r};
  const auto table = nld_table(one);
  CHECK(std::count(table.begin(), table.end(), '\n') == 2);
  CHECK(table.find("meu\t1\t0\t0.4000\t0.2000\t3") != std::string::npos);

  const std::vector<double> values = {0.0, 0.05, 0.55, 1.0, 1.0};
  const auto h = nld_histogram(values);
  CHECK(h.lo == 0.0);
  CHECK(h.hi == 1.0);
  CHECK(h.counts.size() == 10);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[5] == 1);
  CHECK(h.counts[9] == 2);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == values.size());
  CHECK(histogram_svg(one).find("<svg") == 0);
}
