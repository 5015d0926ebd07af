#include "doctest.h"
#include "lak/errors.hpp"
#include "lak/instances/bkt.hpp"
#include "lak/random.hpp"
#include "lak/reachability.hpp"
#include "oracles/bfs_reach.hpp"
#include "support/spec_tables.hpp"

using namespace lak;

using support::as_states;
using support::random_table;
using support::spec_from_table;

TEST_CASE("saturating demo") {
  const auto spec = saturating_demo_spec();
  const auto r = reachable_set(spec, 5);
  REQUIRE(r.per_step.size() == 6);
  CHECK(r.per_step[0] == std::set<State>{State{0.0}});
  CHECK(r.per_step[5] == std::set<State>{State{0.0}, State{1.0}, State{2.0}});
  CHECK(r.fixpoint_step == 2u);
  CHECK(r.is_monotone());
  CHECK(find_unreachable(spec) == std::vector<State>{State{3.0}});
  CHECK(is_reachable(spec, State{2.0}, 2));
  CHECK_FALSE(is_reachable(spec, State{2.0}, 1));
  CHECK_FALSE(is_reachable(spec, State{3.0}, 50));
}

TEST_CASE("horizon zero") {
  const auto r = reachable_set(saturating_demo_spec(), 0);
  CHECK(r.per_step.size() == 1);
  CHECK(r.per_step[0].size() == 1);
  REQUIRE(r.witnesses.size() == 1);
  CHECK(r.witnesses[0].word.empty());
}

TEST_CASE("errors for unknown and non-closed states") {
  auto spec = saturating_demo_spec();
  CHECK_THROWS_AS(is_reachable(spec, State{7.0}, 3), LaError);
  spec.s0 = State{9.0};
  try {
    reachable_set(spec, 2);
    FAIL("expected UnknownState");
  } catch (const LaError& e) {
    CHECK(e.kind() == ErrorKind::UnknownState);
  }
  spec = saturating_demo_spec();
  spec.transition = [](const State& s, const Experience&) {
    return State{std::get<double>(s.payload) + 10.0};
  };
  try {
    reachable_set(spec, 2);
    FAIL("expected NonClosedTransition");
  } catch (const LaError& e) {
    CHECK(e.kind() == ErrorKind::NonClosedTransition);
  }
}

TEST_CASE("random specs with identity epsilon match breadth-first search") {
  for (std::uint64_t k = 0; k < 40; ++k) {
    SplitMix64 rng = SplitMix64::stream(21, k);
    const int n = 1 + static_cast<int>(rng.below(40));
    const int m = 1 + static_cast<int>(rng.below(4));
    const auto next = random_table(rng, n, m);
    std::vector<int> eps(n);
    for (int i = 0; i < n; ++i) eps[i] = i;
    const int s0 = static_cast<int>(rng.below(n));
    const int horizon = static_cast<int>(rng.below(11));
    const auto spec = spec_from_table(next, eps, s0);
    const auto r = reachable_set(spec, horizon);
    const auto expected = oracle::layers_with_identity_epsilon(next, s0, horizon);
    for (int step = 0; step <= horizon; ++step) CHECK(r.per_step[step] == as_states(expected[step]));
    CHECK(r.is_monotone());
    REQUIRE(r.fixpoint_step);
    CHECK(*r.fixpoint_step == std::size_t(oracle::eccentricity(next, s0)));
    // Witness words replay to their states and have minimal length.
    const auto dist = oracle::bfs_distances(next, s0);
    for (const auto& w : r.witnesses) {
      CHECK(replay_word(spec, w.word) == w.state);
      CHECK(int(w.word.size()) == dist[int(std::get<double>(w.state.payload))]);
    }
    std::set<State> unreached;
    for (int s = 0; s < n; ++s) {
      if (dist[s] < 0) unreached.insert(State{double(s)});
    }
    const auto u = find_unreachable(spec);
    CHECK(std::set<State>(u.begin(), u.end()) == unreached);
  }
}

TEST_CASE("arbitrary epsilon maps match exhaustive word enumeration") {
  for (std::uint64_t k = 0; k < 30; ++k) {
    SplitMix64 rng = SplitMix64::stream(22, k);
    const int n = 1 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(2));
    const auto next = random_table(rng, n, m);
    std::vector<int> eps(n);
    for (auto& e : eps) e = static_cast<int>(rng.below(n));
    const int s0 = static_cast<int>(rng.below(n));
    const auto spec = spec_from_table(next, eps, s0);
    const auto r = reachable_set(spec, 6);
    for (int step = 0; step <= 6; ++step) {
      CHECK(r.per_step[step] == as_states(oracle::states_after_words(next, eps, s0, step)));
    }
    for (const auto& w : r.witnesses) CHECK(replay_word(spec, w.word) == w.state);
  }
}

TEST_CASE("growth need not be monotone when epsilon moves the state") {
  // Two states that swap on every step: layers alternate.
  const oracle::Table next{{1}, {0}};
  const auto spec = spec_from_table(next, {1, 0}, 0);
  const auto r = reachable_set(spec, 3);
  CHECK(r.per_step[0] == as_states({0}));
  CHECK(r.per_step[1] == as_states({1}));
  CHECK_FALSE(r.is_monotone());
  CHECK_FALSE(r.fixpoint_step.has_value());
}

TEST_CASE("bkt finite approximation is flagged approximate and closed") {
  const auto spec = bkt::finite_approximation({0.5, 0.3, 0.2, 0.1, 0.0}, 101);
  CHECK(spec.approximate);
  const auto r = reachable_set(spec, 3);
  CHECK(r.per_step[1].size() <= 3);
  CHECK(r.per_step[1].count(spec.s0));  // the empty experience
}
