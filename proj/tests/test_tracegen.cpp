#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "lak/errors.hpp"
#include "lak/tracegen.hpp"

using namespace lak;
using namespace lak::tracegen;

namespace {

GenConfig bkt_config(bkt::BktParams p, std::size_t learners, std::size_t len, std::uint64_t seed) {
  GenConfig c;
  c.seed = seed;
  c.n_learners = learners;
  c.trace_len = len;
  c.generator = BktGenerator{p};
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const LaError& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("certain dynamics give a fixed trace") {
  const auto corpus = generate(bkt_config({0.0, 1.0, 0.0, 0.0, 0.0}, 4, 3, 1));
  for (const auto& g : corpus) {
    CHECK(g.truth.mastery == std::vector<bool>{false, true, true});
    CHECK(g.obs == ObservationSeq::from_symbols({"incorrect", "correct", "correct"}));
    CHECK_FALSE(g.label.has_value());
    CHECK_FALSE(g.truth.propensity.has_value());
  }
}

TEST_CASE("a seed fixes the corpus") {
  const auto cfg = bkt_config({0.3, 0.2, 0.2, 0.1, 0.0}, 30, 12, 77);
  CHECK(generate(cfg) == generate(cfg));
  auto other = cfg;
  other.seed = 78;
  CHECK(generate(cfg) != generate(other));

  GenConfig d;
  d.n_learners = 25;
  d.trace_len = 9;
  d.generator = DropoutGenerator{0.4, 6.0};
  CHECK(generate(d) == generate(d));
}

TEST_CASE("learner streams do not depend on corpus size") {
  const auto small = generate(bkt_config({0.3, 0.2, 0.2, 0.1, 0.0}, 5, 10, 9));
  const auto large = generate(bkt_config({0.3, 0.2, 0.2, 0.1, 0.0}, 50, 10, 9));
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == large[i]);
}

TEST_CASE("learner ids are zero-padded and unique") {
  CHECK(learner_id(0) == "learner-00000");
  CHECK(learner_id(42) == "learner-00042");
  const auto corpus = generate(bkt_config({0.5, 0.5, 0.2, 0.2, 0.0}, 120, 1, 3));
  std::set<std::string> ids;
  for (const auto& g : corpus) ids.insert(g.learner_id);
  CHECK(ids.size() == corpus.size());
}

TEST_CASE("first-step correct rate matches the emission mixture") {
  const auto corpus = generate(bkt_config({0.3, 0.2, 0.2, 0.1, 0.0}, 500, 20, 7));
  std::size_t correct = 0;
  for (const auto& g : corpus) correct += g.obs[0].o.as_symbol() == "correct";
  const double rate = static_cast<double>(correct) / 500.0;
  CHECK(std::abs(rate - 0.41) <= 0.03);
}

TEST_CASE("every step follows the closed-form emission law") {
  const double l0 = 0.3, tr = 0.2, g = 0.2, s = 0.1;
  const std::size_t n = 2000, len = 15;
  const auto corpus = generate(bkt_config({l0, tr, g, s, 0.0}, n, len, 31));
  for (std::size_t t = 1; t <= len; ++t) {
    // mastery probability before the t-th response
    const double m = 1.0 - (1.0 - l0) * std::pow(1.0 - tr, static_cast<double>(t - 1));
    const double p = m * (1.0 - s) + (1.0 - m) * g;
    std::size_t correct = 0, mastered = 0;
    for (const auto& learner : corpus) {
      correct += learner.obs[t - 1].o.as_symbol() == "correct";
      mastered += learner.truth.mastery[t - 1];
    }
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(correct) / n - p) <= 3.0 * sigma);
    const double sigma_m = std::sqrt(m * (1.0 - m) / n);
    CHECK(std::abs(static_cast<double>(mastered) / n - m) <= 3.0 * sigma_m);
  }
}

TEST_CASE("mastery never reverts in generated truth") {
  for (const auto& g : generate(bkt_config({0.2, 0.3, 0.2, 0.2, 0.0}, 200, 10, 4))) {
    for (std::size_t t = 1; t < g.truth.mastery.size(); ++t) {
      if (g.truth.mastery[t - 1]) CHECK(g.truth.mastery[t]);
    }
  }
}

TEST_CASE("dropout corpora carry labels tied to activity") {
  GenConfig c;
  c.seed = 5;
  c.n_learners = 3000;
  c.trace_len = 20;
  c.generator = DropoutGenerator{0.5, 10.0};
  const auto corpus = generate(c);
  std::size_t hi_n = 0, hi_ones = 0, lo_n = 0, lo_ones = 0;
  for (const auto& g : corpus) {
    REQUIRE(g.label.has_value());
    REQUIRE(g.truth.propensity.has_value());
    CHECK(g.obs.size() == 20);
    double mean = 0.0;
    for (const auto& item : g.obs) {
      const double x = item.o.as_number();
      CHECK((x == 0.0 || x == 1.0));
      mean += x / 20.0;
    }
    if (mean > 0.7) {
      ++hi_n;
      hi_ones += *g.label;
    } else if (mean < 0.3) {
      ++lo_n;
      lo_ones += *g.label;
    }
  }
  // logistic(10 * 0.2) ~ 0.88 and logistic(-10 * 0.2) ~ 0.12 at the band edges
  CHECK(static_cast<double>(hi_ones) / hi_n > 0.85);
  CHECK(static_cast<double>(lo_ones) / lo_n < 0.15);
  CHECK(labeled(corpus).size() == corpus.size());
  CHECK(sequences(corpus).size() == corpus.size());
}

TEST_CASE("invalid generator configs are rejected") {
  auto c = bkt_config({0.3, 0.2, 0.2, 0.1, 0.0}, 1, 1, 0);
  c.n_learners = 0;
  CHECK(kind_of([&] { generate(c); }) == ErrorKind::InvalidParams);
  c.n_learners = 1;
  c.trace_len = 0;
  CHECK(kind_of([&] { generate(c); }) == ErrorKind::InvalidParams);
  c.trace_len = 1;
  c.generator = BktGenerator{{1.5, 0.2, 0.2, 0.1, 0.0}};
  CHECK(kind_of([&] { generate(c); }) == ErrorKind::InvalidParams);
  c.generator = DropoutGenerator{std::nan(""), 1.0};
  CHECK(kind_of([&] { generate(c); }) == ErrorKind::InvalidParams);

  const auto unlabeled = generate(bkt_config({0.3, 0.2, 0.2, 0.1, 0.0}, 2, 2, 0));
  CHECK(kind_of([&] { labeled(unlabeled); }) == ErrorKind::InvalidParams);
}
