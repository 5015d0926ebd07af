#include <algorithm>
#include <atomic>

#include "doctest.h"
#include "lak/compliance.hpp"
#include "lak/errors.hpp"
#include "lak/instances/bkt.hpp"
#include "lak/instances/naive.hpp"
#include "lak/suite.hpp"
#include "oracles/lookup_function.hpp"
#include "oracles/permutations.hpp"

using namespace lak;

namespace {

std::vector<ObservationSeq> binary_samples(std::uint64_t seed, std::size_t n, std::size_t max_len) {
  std::vector<ObservationSeq> out;
  auto sampler = suite::binary_sampler(max_len);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    out.push_back(sampler(rng));
  }
  return out;
}

ObservationSeq numbers(std::initializer_list<double> xs) {
  std::vector<Observation> obs;
  for (double x : xs) obs.push_back(Observation::number(x));
  return ObservationSeq::from_observations(obs);
}

// Every binary sequence over {correct, incorrect} of the given length.
std::vector<ObservationSeq> all_binary(std::size_t len) {
  std::vector<ObservationSeq> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < len; ++i) s.push_back((bits >> i) & 1 ? "correct" : "incorrect");
    out.push_back(ObservationSeq::from_symbols(s));
  }
  return out;
}

bool oracle_invariant(const LaFunction& f, const ObservationSeq& o) {
  std::vector<Observation> items;
  for (const auto& x : o) items.push_back(x.o);
  const Inference base = f(o);
  bool invariant = true;
  oracle::heap_permutations<Observation>(items, items.size(), [&](const std::vector<Observation>& p) {
    std::vector<TimedObservation> timed;
    for (std::size_t i = 0; i < p.size(); ++i) timed.push_back({o[i].t, p[i]});
    if (numeric_distance(base, f(ObservationSeq(timed))) > kDifferenceThreshold) invariant = false;
  });
  return invariant;
}

}  // namespace

TEST_CASE("determinism") {
  const auto bkt = implement_function(bkt::bkt_structure({}), GapPolicy::NoTicks);
  CHECK(check_determinism(bkt, binary_samples(1, 100, 10), 3).verdict == Verdict::Pass);
  CHECK(check_determinism(bkt, {}, 3).verdict == Verdict::Pass);

  auto counter = std::make_shared<int>(0);
  LaFunction noisy{"noisy", [counter](const ObservationSeq& o) {
                     return Inference::number(o.size() > 2 ? double((*counter)++) : 0.0);
                   }};
  const auto samples = binary_samples(2, 20, 6);
  const auto r = check_determinism(noisy, samples, 3);
  CHECK(r.verdict == Verdict::Violation);
  REQUIRE(r.violation);
  const auto first = std::find_if(samples.begin(), samples.end(),
                                  [](const auto& s) { return s.size() > 2; });
  CHECK(r.violation->witness.sample_index == std::size_t(first - samples.begin()));
  CHECK_THROWS_AS(check_determinism(bkt, samples, 1), LaError);
}

TEST_CASE("bkt order witness") {
  const auto f = implement_function(bkt::bkt_structure({0.5, 0.3, 0.2, 0.1, 0.0}), GapPolicy::NoTicks);
  const auto r = find_order_witness(f, {ObservationSeq::from_symbols({"correct", "incorrect"})}, 10);
  CHECK(r.evidence == OrderEvidence::WitnessFound);
  REQUIRE(r.witness);
  CHECK(r.witness->permutation == std::vector<std::size_t>{1, 0});
}

TEST_CASE("order search agrees with the brute-force oracle on short sequences") {
  std::vector<LaFunction> fs{naive::ex1_rate(), naive::ex2_last(), naive::ex3_smooth(),
                             implement_function(bkt::bkt_structure({}), GapPolicy::NoTicks)};
  for (std::uint64_t k = 0; k < 5; ++k) {
    SplitMix64 rng = SplitMix64::stream(4, k);
    auto table = oracle::random_lookup_function(rng, 5, "table");
    // Lookup tables read symbols a/b; translate.
    fs.push_back({"table", [table](const ObservationSeq& o) {
                    std::vector<std::string> s;
                    for (const auto& x : o) s.push_back(x.o.as_symbol() == "correct" ? "b" : "a");
                    return table(ObservationSeq::from_symbols(s));
                  }});
  }
  for (const auto& f : fs) {
    for (std::size_t len = 0; len <= 5; ++len) {
      for (const auto& o : all_binary(len)) {
        const auto r = find_order_witness(f, {o}, 5);
        CHECK(r.evidence != OrderEvidence::NoneFoundWithinBudget);
        CHECK((r.evidence == OrderEvidence::ExhaustivelyAbsent) == oracle_invariant(f, o));
      }
    }
  }
}

TEST_CASE("order search on long sequences samples permutations") {
  const auto r = find_order_witness(naive::ex1_rate(), binary_samples(5, 5, 12), 50, 9);
  CHECK(r.evidence != OrderEvidence::WitnessFound);
  CHECK_THROWS_AS(find_order_witness(naive::ex1_rate(), {}, 0), LaError);
  std::vector<ObservationSeq> long_only;
  for (auto& s : binary_samples(6, 20, 12)) {
    if (s.size() > kExhaustiveOrderLength) long_only.push_back(s);
  }
  REQUIRE_FALSE(long_only.empty());
  CHECK(find_order_witness(naive::ex1_rate(), long_only, 50, 9).evidence ==
        OrderEvidence::NoneFoundWithinBudget);
}

TEST_CASE("state-order search permutes the state history") {
  const auto s = bkt::bkt_structure({});
  const auto r = find_state_order_witness(s, {ObservationSeq::from_symbols({"correct", "incorrect"})}, 10);
  CHECK(r.evidence == OrderEvidence::WitnessFound);
  const auto e = find_experience_order_witness(s, {ObservationSeq::from_symbols({"correct", "incorrect"})}, 10);
  CHECK(e.evidence == OrderEvidence::WitnessFound);
}

TEST_CASE("last-observation sufficiency") {
  const auto samples = binary_samples(7, 40, 6);
  const auto ex2 = check_last_observation_sufficiency(naive::ex2_last(), samples);
  CHECK(ex2.verdict == Verdict::Violation);
  REQUIRE(ex2.violation);
  const auto& w = ex2.violation->witness;
  REQUIRE(w.inputs.size() == 2);
  CHECK(w.inputs[0].back().o == w.inputs[1].back().o);
  CHECK(w.inputs[0] != w.inputs[1]);
  CHECK(naive::ex2_last()(w.inputs[0]) == naive::ex2_last()(w.inputs[1]));

  const auto bkt = implement_function(bkt::bkt_structure({}), GapPolicy::NoTicks);
  CHECK(check_last_observation_sufficiency(bkt, samples).verdict == Verdict::Pass);

  const LaFunction constant{"constant", [](const ObservationSeq&) { return Inference::number(1.0); }};
  const auto c = check_last_observation_sufficiency(constant, samples);
  CHECK(c.verdict == Verdict::Violation);
  CHECK(std::any_of(c.notes.begin(), c.notes.end(),
                    [](const std::string& n) { return n.find("degenerate") != std::string::npos; }));

  CHECK_THROWS_AS(check_last_observation_sufficiency(bkt, {ObservationSeq::from_symbols({"correct"})}),
                  LaError);
}

TEST_CASE("prefix consistency of the centered smoother") {
  const auto o = numbers({0.0, 1.0, 0.0});
  const auto series = naive::ex3_smooth_series(o);
  const auto f = naive::ex3_smooth();
  CHECK(series[1].as_number() == doctest::Approx(1.0 / 3.0));
  CHECK(f(o.prefix(2)).as_number() == 0.5);
  const auto r = check_prefix_consistency(series, f, o);
  CHECK(r.verdict == Verdict::Violation);
  REQUIRE(r.violation);
  CHECK(r.violation->witness.time_index == 1u);

  const auto single = numbers({1.0});
  CHECK(check_prefix_consistency(naive::ex3_smooth_series(single), f, single).verdict == Verdict::Pass);

  const auto s = bkt::bkt_structure({});
  const auto obs = ObservationSeq::from_symbols({"correct", "incorrect", "correct"});
  std::vector<Inference> per_time;
  for (auto& ti : run(s, obs).inferences) per_time.push_back(ti.i);
  CHECK(check_prefix_consistency(per_time, implement_function(s), obs).verdict == Verdict::Pass);
}

TEST_CASE("reference to unreachable states") {
  // A counter that does not saturate, checked against the saturating spec.
  LaStructure counter;
  counter.name = "counter";
  counter.s0 = State{0.0};
  counter.f_e = [](const ObservationSeq&) { return Experience{std::string("a")}; };
  counter.f_s = [](const State& s, const Experience& e) {
    return e.is_empty() ? s : State{std::get<double>(s.payload) + 1.0};
  };
  counter.f_i = [](std::span<const State> s) { return Inference::number(std::get<double>(s.back().payload)); };
  const auto spec = saturating_demo_spec();
  const auto short_runs = std::vector<ObservationSeq>{ObservationSeq::from_symbols({"x", "x"})};
  CHECK(check_state_reachability(counter, spec, short_runs).verdict == Verdict::Pass);
  // The counter reaches 3, which the spec cannot; tabulating the spec still works.
  const auto long_runs = std::vector<ObservationSeq>{ObservationSeq::from_symbols({"x", "x", "x"})};
  const auto r = check_state_reachability(counter, spec, long_runs);
  CHECK(r.verdict == Verdict::Violation);
  REQUIRE(r.violation);
  CHECK(r.violation->witness.time_index == 3u);
}

TEST_CASE("builtin grid, witnesses and replay") {
  const ReportConfig config;
  const auto reports = suite::run_builtin_suite(config);
  REQUIRE(reports.size() == 6);
  const std::map<std::string, std::set<Rule>> expected{
      {"bkt", {}},
      {"dashboard", {}},
      {"predictive", {}},
      {"ex1_rate", {Rule::OrderInsensitiveExperience, Rule::OrderInsensitiveInference}},
      {"ex2_last", {Rule::LastObservationSufficiency}},
      {"ex3_smooth", {Rule::PrefixInconsistency}},
  };
  const auto subjects = suite::builtin_subjects();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    CAPTURE(rep.subject);
    const auto& flagged = expected.at(rep.subject);
    for (Rule rule : kAllRules) {
      const Verdict v = rep.verdicts.at(rule);
      if (flagged.count(rule)) {
        CHECK(v == Verdict::Violation);
      } else if (rule == Rule::UnreachableStateReference) {
        CHECK(v == Verdict::NotApplicable);
      } else {
        CHECK(v == Verdict::Pass);
      }
    }
    CHECK(rep.witnesses.size() == flagged.size());
    for (const auto& v : rep.witnesses) CHECK(replay(subjects[i], v, config));
  }
}

TEST_CASE("reports are reproducible for a fixed seed") {
  const auto subject = suite::builtin_subject("ex2_last");
  ReportConfig config;
  config.seed = 99;
  const auto a = full_report(subject, config);
  const auto b = full_report(subject, config);
  CHECK(a.verdicts == b.verdicts);
  CHECK(a.witnesses == b.witnesses);
  CHECK(a.notes == b.notes);
}

TEST_CASE("order-invariant subjects can be whitelisted") {
  auto subject = suite::builtin_subject("ex1_rate");
  subject.order_invariant_by_design = true;
  const auto r = full_report(subject, ReportConfig{});
  CHECK(r.verdicts.at(Rule::OrderInsensitiveExperience) == Verdict::NotApplicable);
  CHECK(r.verdicts.at(Rule::OrderInsensitiveInference) == Verdict::NotApplicable);
  CHECK_FALSE(r.has_violation());
}

TEST_CASE("fixed corpus replaces sampling") {
  auto subject = suite::builtin_subject("ex2_last");
  subject.corpus = {ObservationSeq::from_symbols({"correct", "correct"}),
                    ObservationSeq::from_symbols({"incorrect", "correct"})};
  const auto samples = report_samples(subject, ReportConfig{});
  CHECK(samples.size() == 4);
  CHECK(samples[0] == subject.corpus[0]);
}
