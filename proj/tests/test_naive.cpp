#include "doctest.h"
#include "lak/errors.hpp"
#include "lak/instances/naive.hpp"

using namespace lak;

TEST_CASE("correctness rate") {
  const auto f = naive::ex1_rate();
  CHECK(f(ObservationSeq::from_symbols({"correct", "incorrect", "correct", "correct"})) ==
        Inference::number(0.75));
  CHECK(f(ObservationSeq{}) == Inference::number(0.0));
  CHECK_THROWS_AS(f(ObservationSeq::from_symbols({"perhaps"})), LaError);
}

TEST_CASE("last response label") {
  const auto f = naive::ex2_last();
  CHECK(f(ObservationSeq::from_symbols({"correct", "incorrect"})) == Inference::label("not understood"));
  CHECK(f(ObservationSeq::from_symbols({"incorrect", "correct"})) == Inference::label("understood"));
}

TEST_CASE("centered smoother leaks later observations") {
  std::vector<Observation> obs{Observation::number(0), Observation::number(1), Observation::number(0)};
  const auto o = ObservationSeq::from_observations(obs);
  const auto series = naive::ex3_smooth_series(o);
  REQUIRE(series.size() == 3);
  CHECK(series[0].as_number() == 0.5);
  CHECK(series[1].as_number() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(series[2].as_number() == 0.5);
  CHECK(naive::ex3_smooth()(o.prefix(2)).as_number() == 0.5);
  CHECK_THROWS_AS(naive::ex3_smooth(2), LaError);
}

TEST_CASE("the practice holds the three functions") {
  const auto p = naive::naive_practices();
  CHECK(p.size() == 3);
  CHECK(p.at("ex3_smooth").name == "ex3_smooth");
}
