#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "gphsmm/errors.hpp"
#include "gphsmm/lower.hpp"
#include "oracles.hpp"

using namespace gphsmm;

namespace {

hsmm::SegmentScoreTable random_scores(Rng& rng, std::size_t len, std::size_t max_len, std::size_t states) {
  hsmm::SegmentScoreTable t(len, max_len, states);
  for (std::size_t s = 0; s < len; ++s)
    for (std::size_t k = 1; k <= max_len && s + k <= len; ++k)
      for (std::size_t c = 0; c < states; ++c) t.at(s, k, c) = -3.0 * rng.uniform() * static_cast<double>(k);
  return t;
}

TransitionTable random_transitions(Rng& rng, std::size_t states) {
  TransitionTable t(states, 0.1);
  for (int i = 0; i < 5; ++i) {
    std::vector<int> seq(1 + rng.index(6));
    for (auto& c : seq) c = static_cast<int>(rng.index(states));
    t.add(seq);
  }
  return t;
}

ElementPrior random_prior(Rng& rng, std::size_t C, std::size_t B) {
  auto norm = [&](std::size_t rows) {
    std::vector<double> v(rows * C);
    for (auto& x : v) x = 0.05 + rng.uniform();
    for (std::size_t r = 0; r < rows; ++r) {
      const double z = std::accumulate(v.begin() + r * C, v.begin() + (r + 1) * C, 0.0);
      for (std::size_t c = 0; c < C; ++c) v[r * C + c] /= z;
    }
    return v;
  };
  auto begin = norm(B);
  auto middle = norm(B * C);
  auto end = norm(B * C);
  return ElementPrior(C, B, begin, middle, end);
}

// P(c | c', ctx) from the raw tables, renormalized over c.
double poe(const TransitionTable& t, const ElementPrior& prior, std::size_t ctx, int prev, std::size_t c) {
  const std::size_t C = t.num_states();
  auto w = [&](std::size_t x) {
    const double base = prev < 0 ? t.initial(x) : t.trans(static_cast<std::size_t>(prev), x);
    if (ctx == 0) return base;
    const std::size_t b = (ctx - 1) / 3;
    const auto pos = static_cast<UnitPosition>((ctx - 1) % 3);
    return base * prior.prob(x, b, pos, prev);
  };
  double z = 0.0;
  for (std::size_t x = 0; x < C; ++x) z += w(x);
  return w(c) / z;
}

struct Instance {
  hsmm::SegmentScoreTable scores;
  TransitionTable trans;
  DurationModel dur;
  ElementPrior prior;
  std::vector<std::size_t> ctx;
};

Instance random_instance(Rng& rng, std::size_t T, std::size_t K, std::size_t C, std::size_t B) {
  Instance in{random_scores(rng, T, K, C), random_transitions(rng, C), DurationModel(1.0 + 3.0 * rng.uniform(), K),
              random_prior(rng, C, B), std::vector<std::size_t>(T)};
  for (auto& c : in.ctx) c = rng.index(num_prior_contexts(B));
  return in;
}

std::vector<double> brute_weights(const Instance& in, const std::vector<oracle::Path>& paths) {
  const auto log_dur = oracle::poisson_log_table(in.dur.lambda(), in.dur.max_len());
  std::vector<double> w;
  for (const auto& p : paths)
    w.push_back(oracle::path_weight(
        p, [&](std::size_t s, std::size_t k, int c) { return in.scores.at(s, k, static_cast<std::size_t>(c)); },
        log_dur,
        [&](std::size_t s, int c) { return std::log(poe(in.trans, in.prior, in.ctx[s], -1, static_cast<std::size_t>(c))); },
        [&](std::size_t s, int prev, int c) { return std::log(poe(in.trans, in.prior, in.ctx[s], prev, static_cast<std::size_t>(c))); }));
  return w;
}

oracle::Path as_path(const ElementSegmentation& seg) {
  oracle::Path p;
  for (const auto& s : seg.segments) p.push_back({s.start, s.length(), s.class_id});
  return p;
}

}  // namespace

TEST_CASE("duration model") {
  const DurationModel d(4.0, 10);
  CHECK(d.log_pmf(4) > d.log_pmf(1));
  double total = 0.0;
  for (std::size_t k = 1; k <= 10; ++k) total += std::exp(d.log_pmf(k));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  const auto ref = oracle::poisson_log_table(4.0, 10);
  for (std::size_t k = 1; k <= 10; ++k) CHECK(d.log_pmf(k) == doctest::Approx(ref[k - 1]).epsilon(1e-12));
  CHECK(DurationModel(3.0, 1).log_pmf(1) == 0.0);
  CHECK_THROWS_AS(d.log_pmf(0), std::out_of_range);
  CHECK_THROWS_AS(d.log_pmf(11), std::out_of_range);
  // large means stay finite
  const DurationModel wide(200.0, 300);
  for (std::size_t k = 1; k <= 300; ++k) CHECK(std::isfinite(wide.log_pmf(k)));
}

TEST_CASE("transition table rows are normalized and positive") {
  Rng rng(3);
  const auto t = random_transitions(rng, 4);
  double init = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    init += t.initial(c);
    double row = 0.0;
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(t.trans(c, n) > 0.0);
      row += t.trans(c, n);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(init == doctest::Approx(1.0).epsilon(1e-9));

  TransitionTable u(3, 0.1);
  const std::vector<int> seq = {0, 1, 1, 2};
  u.add(seq);
  CHECK(u.pair_count(1, 1) == 1.0);
  CHECK(u.total_transitions() == 3.0);
  CHECK(u.trans(0, 1) == doctest::Approx(1.1 / 1.3).epsilon(1e-14));
  u.remove(seq);
  CHECK(u.total_transitions() == 0.0);
  CHECK(u.trans(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("three samples, one class: four compositions") {
  hsmm::SegmentScoreTable scores(3, 3, 1);
  const double v[3][3] = {{-1.0, -2.5, -4.0}, {-0.7, -1.9, 0}, {-1.3, 0, 0}};
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t k = 1; s + k <= 3; ++k) scores.at(s, k, 0) = v[s][k - 1];
  TransitionTable trans(1, 0.1);
  const DurationModel dur(2.0, 3);
  const auto prior = ElementPrior::uniform(1, 1);
  const std::vector<std::size_t> ctx(3, 0);
  const auto lat = forward_filter(scores, trans, dur, prior, ctx);

  const auto ld = oracle::poisson_log_table(2.0, 3);
  // single state: every initial and transition factor is exactly 1
  const double by_hand[4] = {
      v[0][2] + ld[2],
      v[0][0] + ld[0] + v[1][1] + ld[1],
      v[0][1] + ld[1] + v[2][0] + ld[0],
      v[0][0] + v[1][0] + v[2][0] + 3 * ld[0],
  };
  const double total = oracle::log_sum({by_hand[0], by_hand[1], by_hand[2], by_hand[3]});
  CHECK(lat.log_total() == doctest::Approx(total).epsilon(1e-12));
  CHECK(oracle::all_paths(3, 3, 1).size() == 4);
}

TEST_CASE("single sample series") {
  Rng rng(1);
  const auto scores = random_scores(rng, 1, 3, 2);
  const auto lat = forward_filter(scores, TransitionTable(2, 0.1), DurationModel(2, 3),
                                  ElementPrior::uniform(2, 1), std::vector<std::size_t>(1, 0));
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::isfinite(lat.alpha(1, 1, c)));
    CHECK(lat.alpha(1, 2, c) == kLogZero);
    CHECK(lat.alpha(1, 3, c) == kLogZero);
  }
}

TEST_CASE("forward mass equals enumeration on every small shape") {
  Rng rng(2024);
  for (std::size_t T = 1; T <= 6; ++T)
    for (std::size_t K = 1; K <= 3; ++K)
      for (std::size_t C = 1; C <= 2; ++C) {
        const auto in = random_instance(rng, T, K, C, 2);
        const auto lat = forward_filter(in.scores, in.trans, in.dur, in.prior, in.ctx);
        const auto paths = oracle::all_paths(T, K, static_cast<int>(C));
        const double expect = oracle::log_sum(brute_weights(in, paths));
        CHECK(std::fabs(std::exp(lat.log_total() - expect) - 1.0) < 1e-6);
      }
}

TEST_CASE("backward samples follow the enumerated posterior") {
  Rng rng(77);
  const auto in = random_instance(rng, 5, 3, 2, 2);
  const auto lat = forward_filter(in.scores, in.trans, in.dur, in.prior, in.ctx);
  const auto paths = oracle::all_paths(5, 3, 2);
  const auto w = brute_weights(in, paths);
  const double z = oracle::log_sum(w);
  std::vector<double> probs;
  for (double x : w) probs.push_back(std::exp(x - z));
  std::map<oracle::Path, std::size_t> index;
  for (std::size_t i = 0; i < paths.size(); ++i) index[paths[i]] = i;
  std::vector<std::size_t> counts(paths.size(), 0);
  const std::size_t n = 20000;
  Rng draw(5);
  for (std::size_t i = 0; i < n; ++i) {
    const auto seg = backward_sample(lat, in.trans, in.prior, in.ctx, draw);
    CHECK_NOTHROW(check_tiling(seg, 5, 3));
    counts[index.at(as_path(seg))]++;
  }
  CHECK(oracle::chi_square_z(probs, counts, n) < 3.0);
}

TEST_CASE("a single feasible path is always returned") {
  hsmm::SegmentScoreTable scores(4, 3, 2);
  scores.at(0, 3, 1) = -5.0;
  scores.at(3, 1, 0) = -2.0;
  const TransitionTable trans(2, 0.1);
  const DurationModel dur(2, 3);
  const auto prior = ElementPrior::uniform(2, 1);
  const std::vector<std::size_t> ctx(4, 0);
  const auto lat = forward_filter(scores, trans, dur, prior, ctx);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto seg = backward_sample(lat, trans, prior, ctx, rng);
    REQUIRE(seg.segments.size() == 2);
    CHECK(seg.segments[0] == ElementSegment{0, 3, 1});
    CHECK(seg.segments[1] == ElementSegment{3, 4, 0});
  }
}

TEST_CASE("infeasible columns are reported") {
  hsmm::SegmentScoreTable scores(4, 2, 1);
  scores.at(0, 1, 0) = -1.0;
  try {
    forward_filter(scores, TransitionTable(1, 0.1), DurationModel(1, 2), ElementPrior::uniform(1, 1),
                   std::vector<std::size_t>(4, 0));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

TEST_CASE("very small segment scores stay finite") {
  Rng rng(4);
  auto in = random_instance(rng, 6, 3, 2, 1);
  for (std::size_t s = 0; s < 6; ++s)
    for (std::size_t k = 1; k <= 3 && s + k <= 6; ++k)
      for (std::size_t c = 0; c < 2; ++c) in.scores.at(s, k, c) = -1e6 * static_cast<double>(k) - rng.uniform();
  const auto lat = forward_filter(in.scores, in.trans, in.dur, in.prior, in.ctx);
  CHECK(std::isfinite(lat.log_total()));
  const auto paths = oracle::all_paths(6, 3, 2);
  CHECK(lat.log_total() == doctest::Approx(oracle::log_sum(brute_weights(in, paths))).epsilon(1e-12));
  Rng draw(1);
  CHECK_NOTHROW(backward_sample(lat, in.trans, in.prior, in.ctx, draw));
}

TEST_CASE("uniform prior leaves the transition model unchanged") {
  Rng rng(9);
  auto in = random_instance(rng, 6, 3, 2, 2);
  const auto uniform = ElementPrior::uniform(2, 2);
  const auto with_ctx = forward_filter(in.scores, in.trans, in.dur, uniform, in.ctx);
  const auto without = forward_filter(in.scores, in.trans, in.dur, uniform, std::vector<std::size_t>(6, 0));
  for (std::size_t t = 0; t <= 6; ++t) {
    const auto a = with_ctx.column(t), b = without.column(t);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("product-of-experts rows are normalized") {
  Rng rng(10);
  const auto trans = random_transitions(rng, 3);
  const auto prior = random_prior(rng, 3, 2);
  const auto table = lower_transitions(trans, prior);
  for (std::size_t ctx = 0; ctx < num_prior_contexts(2); ++ctx) {
    double init = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      init += std::exp(table.initial(ctx, c));
      CHECK(std::exp(table.initial(ctx, c)) == doctest::Approx(poe(trans, prior, ctx, -1, c)).epsilon(1e-12));
    }
    CHECK(init == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t p = 0; p < 3; ++p) {
      double row = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        row += std::exp(table.trans(ctx, p, c));
        CHECK(std::exp(table.trans(ctx, p, c)) ==
              doctest::Approx(poe(trans, prior, ctx, static_cast<int>(p), c)).epsilon(1e-12));
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("unit context follows the previous alignment") {
  const ElementSegmentation e{"s", {{0, 2, 0}, {2, 3, 1}, {3, 6, 2}, {6, 7, 0}}};
  const UnitSegmentation u{"s", {{0, 3, 1}, {3, 4, 0}}};
  const auto ctx = unit_context(e, u, 8, 2);
  const std::vector<std::size_t> expect = {
      prior_context_id(1, UnitPosition::Begin),  prior_context_id(1, UnitPosition::Begin),
      prior_context_id(1, UnitPosition::Middle), prior_context_id(1, UnitPosition::End),
      prior_context_id(1, UnitPosition::End),    prior_context_id(1, UnitPosition::End),
      prior_context_id(0, UnitPosition::Begin),  0};
  CHECK(ctx == expect);
  CHECK(unit_context(e, UnitSegmentation{"s", {}}, 8, 2) == std::vector<std::size_t>(8, 0));
}

namespace {

std::vector<TimeSeries> toy_corpus(Rng& rng, int copies) {
  std::vector<double> base;
  for (int t = 0; t < 30; ++t) {
    const double phase = t < 10 ? 0.0 : t < 20 ? 2.0 : -1.5;
    base.push_back(phase + 0.3 * std::sin(0.4 * (t % 10)));
    base.push_back(-phase + 0.05 * rng.normal());
  }
  std::vector<TimeSeries> out;
  for (int i = 0; i < copies; ++i) out.emplace_back("s" + std::to_string(i), 2, base);
  return out;
}

Hyperparams small_h() {
  Hyperparams h;
  h.num_element_classes = 3;
  h.num_unit_classes = 2;
  h.max_element_len = 12;
  h.lambda_p = 8.0;
  return h;
}

}  // namespace

TEST_CASE("resampling is deterministic and conserves counts") {
  Rng data(1);
  const auto corpus = toy_corpus(data, 3);
  const auto h = small_h();
  const auto prior = ElementPrior::uniform(3, 2);
  const std::vector<std::size_t> ctx(30, 0);

  LowerLayer a(corpus, h, 5), b(corpus, h, 5);
  Rng ra(8), rb(8);
  a.initialize_random(ra);
  b.initialize_random(rb);
  for (int sweep = 0; sweep < 3; ++sweep)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      a.resample_sequence(i, prior, ctx, ra);
      b.resample_sequence(i, prior, ctx, rb);
      CHECK(a.segmentation(i) == b.segmentation(i));
      CHECK_NOTHROW(check_tiling(a.segmentation(i), 30, 12));
    }

  double transitions = 0.0;
  std::size_t segments = 0;
  for (const auto& s : a.segmentations()) {
    transitions += static_cast<double>(s.segments.size() - 1);
    segments += s.segments.size();
  }
  CHECK(a.transitions().total_transitions() == transitions);
  std::size_t gp_segments = 0;
  for (const auto& gp : a.gps()) gp_segments += gp.num_segments();
  CHECK(gp_segments == segments);
}

TEST_CASE("identical series tend to share their structure") {
  Rng data(2);
  const auto corpus = toy_corpus(data, 2);
  const auto h = small_h();
  const auto prior = ElementPrior::uniform(3, 2);
  const std::vector<std::size_t> ctx(30, 0);
  int agree = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LowerLayer layer(corpus, h, seed);
    Rng rng(seed);
    layer.initialize_random(rng);
    for (int sweep = 0; sweep < 6; ++sweep)
      for (std::size_t i = 0; i < 2; ++i) layer.resample_sequence(i, prior, ctx, rng);
    const auto& s0 = layer.segmentation(0).segments;
    const auto& s1 = layer.segmentation(1).segments;
    std::size_t same = 0;
    for (std::size_t t = 0; t < 30; ++t) {
      auto cls = [t](const std::vector<ElementSegment>& s) {
        for (const auto& x : s)
          if (t >= x.start && t < x.end) return x.class_id;
        return -1;
      };
      same += cls(s0) == cls(s1);
    }
    agree += same >= 24;
  }
  CHECK(agree >= 6);
}
