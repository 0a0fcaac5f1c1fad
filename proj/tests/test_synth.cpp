#include <doctest.h>

#include <cmath>
#include <limits>

#include "gphsmm/errors.hpp"
#include "gphsmm/synth.hpp"

using namespace gphsmm;

TEST_CASE("noiseless single unit is the concatenation of its prototypes") {
  SynthConfig cfg;
  cfg.dim = 2;
  cfg.workers = 1;
  cfg.cycles_per_worker = 1;
  cfg.num_element_labels = 2;
  cfg.unit_elements = {{0, 1}};
  cfg.procedure = {0};
  cfg.noise_sigma = 0.0;
  const auto c = generate(cfg, 4);
  REQUIRE(c.series.size() == 1);
  const auto& seg = c.elements[0].segments;
  REQUIRE(seg.size() == 2);
  for (const auto& s : seg)
    for (std::size_t t = s.start; t < s.end; ++t)
      for (std::size_t d = 0; d < 2; ++d)
        CHECK(c.series[0].at(t, d) == c.prototypes[static_cast<std::size_t>(s.class_id)].value(d, static_cast<double>(t - s.start)));
  CHECK(c.units[0].segments.size() == 1);
}

TEST_CASE("fluctuation changes some element strings") {
  auto cfg = assembly_preset();
  cfg.fluctuation = 0.3;
  const auto c = generate(cfg, 2);
  const std::vector<int> canonical = {0, 1, 2, 3, 4, 3, 4, 3, 4, 5, 6, 7};
  int changed = 0;
  for (const auto& e : c.elements) changed += e.classes() != canonical;
  CHECK(changed > 0);

  cfg.fluctuation = 0.0;
  const auto clean = generate(cfg, 2);
  for (const auto& e : clean.elements) CHECK(e.classes() == canonical);
}

TEST_CASE("assembly corpus") {
  const auto cfg = assembly_preset();
  const auto c = generate(cfg, 1);
  CHECK(c.series.size() == 108);
  for (std::size_t i = 0; i < c.series.size(); ++i) {
    const auto& s = c.series[i];
    CHECK(s.dim() == 6);
    CHECK(s.rate_hz() == 5.0);
    const double seconds = static_cast<double>(s.length()) / 5.0;
    CHECK(seconds >= 29.0);
    CHECK(seconds <= 65.0);
    CHECK_NOTHROW(check_tiling(c.elements[i], s.length(), static_cast<std::size_t>(cfg.max_element_len)));
    CHECK_NOTHROW(check_tiling(c.units[i], c.elements[i].segments.size(), 100));
    CHECK(c.units[i].segments.size() == 3);
  }
}

TEST_CASE("generation is a pure function of config and seed") {
  const auto cfg = assembly_preset();
  const auto a = generate(cfg, 9), b = generate(cfg, 9), other = generate(cfg, 10);
  CHECK(a.elements == b.elements);
  CHECK(a.series[5].data() == b.series[5].data());
  CHECK(a.series[5].data() != other.series[5].data());
}

TEST_CASE("noiseless prototypes are separable by nearest template") {
  auto cfg = assembly_preset();
  cfg.noise_sigma = 0.0;
  cfg.fluctuation = 0.0;
  cfg.cycles_per_worker = 4;
  const auto c = generate(cfg, 5);
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < c.series.size(); ++i)
    for (const auto& s : c.elements[i].segments) {
      int best = -1;
      double best_err = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < c.prototypes.size(); ++p) {
        double err = 0.0;
        for (std::size_t t = s.start; t < s.end; ++t)
          for (std::size_t d = 0; d < cfg.dim; ++d) {
            const double r = c.series[i].at(t, d) - c.prototypes[p].value(d, static_cast<double>(t - s.start));
            err += r * r;
          }
        if (err < best_err) {
          best_err = err;
          best = static_cast<int>(p);
        }
      }
      correct += best == s.class_id;
      ++total;
    }
  CHECK(correct == total);
}

TEST_CASE("inconsistent generator configs are rejected") {
  auto cfg = assembly_preset();
  cfg.prototypes.resize(8);
  for (auto& p : cfg.prototypes) {
    p.offset.assign(5, 0.0);
    p.waves.assign(5, {});
  }
  CHECK_THROWS_AS(generate(cfg, 1), ConfigError);
  cfg = assembly_preset();
  cfg.procedure = {0, 5};
  CHECK_THROWS_AS(validate_synth_config(cfg), ConfigError);
  cfg = assembly_preset();
  cfg.fluctuation = 1.5;
  CHECK_THROWS_AS(validate_synth_config(cfg), ConfigError);
}
