#include "lak/compliance.hpp"

#include <algorithm>
#include <numeric>

#include "lak/errors.hpp"

namespace lak {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::NonDeterministicExperience: return "NonDeterministicExperience";
    case Rule::NonDeterministicInference: return "NonDeterministicInference";
    case Rule::OrderInsensitiveExperience: return "OrderInsensitiveExperience";
    case Rule::OrderInsensitiveInference: return "OrderInsensitiveInference";
    case Rule::LastObservationSufficiency: return "LastObservationSufficiency";
    case Rule::PrefixInconsistency: return "PrefixInconsistency";
    case Rule::UnreachableStateReference: return "UnreachableStateReference";
  }
  return "";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Violation: return "violation";
    case Verdict::NotApplicable: return "not_applicable";
  }
  return "";
}

Rule rule_from_string(std::string_view name) {
  for (Rule r : kAllRules) {
    if (to_string(r) == name) return r;
  }
  throw LaError(ErrorKind::SchemaError, "unknown rule '" + std::string(name) + "'");
}

Verdict verdict_from_string(std::string_view name) {
  for (Verdict v : {Verdict::Pass, Verdict::Violation, Verdict::NotApplicable}) {
    if (to_string(v) == name) return v;
  }
  throw LaError(ErrorKind::SchemaError, "unknown verdict '" + std::string(name) + "'");
}

std::string_view to_string(OrderEvidence e) {
  switch (e) {
    case OrderEvidence::WitnessFound: return "witness_found";
    case OrderEvidence::NoneFoundWithinBudget: return "none_found_within_budget";
    case OrderEvidence::ExhaustivelyAbsent: return "exhaustively_absent";
  }
  return "";
}

namespace {

CheckResult violation(Rule rule, Witness w, std::string note) {
  CheckResult r;
  r.verdict = Verdict::Violation;
  r.violation = Violation{rule, std::move(w), std::move(note)};
  return r;
}

template <class Out, class Eval>
CheckResult determinism(Rule rule, Eval eval, const std::vector<ObservationSeq>& samples,
                        std::size_t repeats) {
  if (repeats < 2) throw LaError(ErrorKind::InvalidParams, "determinism needs repeats >= 2");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Out first = eval(samples[k]);
    for (std::size_t r = 1; r < repeats; ++r) {
      const Out again = eval(samples[k]);
      if (!approx_equal(first, again, kEqualityTolerance)) {
        Witness w;
        w.sample_index = k;
        w.inputs = {samples[k]};
        w.outputs = {describe(first), describe(again)};
        return violation(rule, std::move(w),
                         "repeated evaluation of the same sequence gave different outputs");
      }
    }
  }
  return {};
}

// One sample prepared for permutation search: `n` permutable positions, an
// evaluator for a permutation, and a test for permutations that reproduce the
// original sequence (repeated values).
template <class Out>
struct Permutable {
  std::size_t n = 0;
  std::function<Out(const std::vector<std::size_t>&)> eval;
  std::function<bool(const std::vector<std::size_t>&)> same_as_original;
};

template <class Out>
OrderSearchResult search_permutations(const std::vector<ObservationSeq>& bases,
                                      const std::function<Permutable<Out>(std::size_t)>& prepare,
                                      std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw LaError(ErrorKind::InvalidParams, "order search needs budget >= 1");
  OrderSearchResult result;
  bool exhaustive = true;

  for (std::size_t k = 0; k < bases.size(); ++k) {
    Permutable<Out> p = prepare(k);
    if (p.n < 2) continue;
    std::vector<std::size_t> identity(p.n);
    std::iota(identity.begin(), identity.end(), 0);
    const Out base = p.eval(identity);

    auto try_perm = [&](const std::vector<std::size_t>& perm) {
      if (perm == identity || p.same_as_original(perm)) return false;
      ++result.permutations_tried;
      const Out out = p.eval(perm);
      if (numeric_distance(base, out) > kDifferenceThreshold) {
        result.evidence = OrderEvidence::WitnessFound;
        result.witness = OrderWitness{k, perm, bases[k], describe(base), describe(out)};
        return true;
      }
      return false;
    };

    if (p.n <= kExhaustiveOrderLength) {
      std::vector<std::size_t> perm = identity;
      while (std::next_permutation(perm.begin(), perm.end())) {
        if (try_perm(perm)) return result;
      }
    } else {
      exhaustive = false;
      SplitMix64 rng = SplitMix64::stream(seed, k);
      for (std::size_t b = 0; b < budget; ++b) {
        std::vector<std::size_t> perm = identity;
        for (std::size_t i = p.n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        if (try_perm(perm)) return result;
      }
    }
  }
  result.evidence =
      exhaustive ? OrderEvidence::ExhaustivelyAbsent : OrderEvidence::NoneFoundWithinBudget;
  return result;
}

ObservationSeq permute_payloads(const ObservationSeq& seq, const std::vector<std::size_t>& perm) {
  std::vector<TimedObservation> items;
  items.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) items.push_back({seq[i].t, seq[perm[i]].o});
  return ObservationSeq(std::move(items));
}

bool same_payloads(const ObservationSeq& seq, const std::vector<std::size_t>& perm) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!(seq[i].o == seq[perm[i]].o)) return false;
  }
  return true;
}

template <class Out>
OrderSearchResult search_observations(const std::function<Out(const ObservationSeq&)>& f,
                                      const std::vector<ObservationSeq>& bases,
                                      std::size_t budget, std::uint64_t seed) {
  std::function<Permutable<Out>(std::size_t)> prepare = [&](std::size_t k) {
    const ObservationSeq& seq = bases[k];
    return Permutable<Out>{
        seq.size(),
        [&f, &seq](const std::vector<std::size_t>& perm) { return f(permute_payloads(seq, perm)); },
        [&seq](const std::vector<std::size_t>& perm) { return same_payloads(seq, perm); }};
  };
  return search_permutations<Out>(bases, prepare, budget, seed);
}

Witness order_violation_witness(const std::vector<ObservationSeq>& samples) {
  // The first sample holding two different observations: no reordering of it
  // changed the output.
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (!(s[i].o == s[0].o)) {
        Witness w;
        w.sample_index = k;
        w.inputs = {s};
        return w;
      }
    }
  }
  return {};
}

bool has_distinct_permutation(const std::vector<ObservationSeq>& samples) {
  for (const auto& s : samples) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (!(s[i].o == s[0].o)) return true;
    }
  }
  return false;
}

CheckResult order_check(Rule rule, const OrderSearchResult& search,
                        const std::vector<ObservationSeq>& samples) {
  CheckResult r;
  if (search.witness) {
    const auto& w = *search.witness;
    r.notes.push_back(std::string(to_string(rule)) + ": order witness on sample " +
                      std::to_string(w.sample_index) + " (" + w.output_original + " vs " +
                      w.output_permuted + ")");
    return r;
  }
  if (!has_distinct_permutation(samples)) {
    r.verdict = Verdict::NotApplicable;
    r.notes.push_back(std::string(to_string(rule)) + ": no sample admits a distinct reordering");
    return r;
  }
  Witness w = order_violation_witness(samples);
  return violation(rule, std::move(w),
                   "no reordering changed the output (" + std::string(to_string(search.evidence)) +
                       ", " + std::to_string(search.permutations_tried) + " permutations tried)");
}

std::vector<Inference> honest_per_time(const LaFunction& f, const ObservationSeq& o) {
  std::vector<Inference> out;
  out.reserve(o.size());
  for (std::size_t t = 1; t <= o.size(); ++t) out.push_back(f(o.prefix(t)));
  return out;
}

std::vector<Inference> per_time_of(const Subject& subject, const ObservationSeq& o) {
  if (subject.per_time) return subject.per_time(o);
  return honest_per_time(subject.function, o);
}

}  // namespace

CheckResult check_determinism(const LaFunction& f, const std::vector<ObservationSeq>& samples,
                              std::size_t repeats) {
  return determinism<Inference>(Rule::NonDeterministicInference, f, samples, repeats);
}

CheckResult check_experience_determinism(const LaStructure& structure,
                                         const std::vector<ObservationSeq>& samples,
                                         std::size_t repeats) {
  return determinism<Experience>(Rule::NonDeterministicExperience, structure.f_e, samples,
                                 repeats);
}

OrderSearchResult find_order_witness(const LaFunction& f,
                                     const std::vector<ObservationSeq>& base_samples,
                                     std::size_t budget, std::uint64_t seed) {
  return search_observations<Inference>(f.eval, base_samples, budget, seed);
}

OrderSearchResult find_experience_order_witness(const LaStructure& structure,
                                                const std::vector<ObservationSeq>& base_samples,
                                                std::size_t budget, std::uint64_t seed) {
  return search_observations<Experience>(structure.f_e, base_samples, budget, seed);
}

OrderSearchResult find_state_order_witness(const LaStructure& structure,
                                           const std::vector<ObservationSeq>& base_samples,
                                           std::size_t budget, std::uint64_t seed,
                                           GapPolicy gap_policy) {
  std::vector<StateSeq> histories;
  histories.reserve(base_samples.size());
  for (const auto& s : base_samples) histories.push_back(run(structure, s, gap_policy).states);

  std::function<Permutable<Inference>(std::size_t)> prepare = [&](std::size_t k) {
    const StateSeq& states = histories[k];
    auto permuted = [&states](const std::vector<std::size_t>& perm) {
      StateSeq out{states.front()};
      for (std::size_t i : perm) out.push_back(states[i + 1]);
      return out;
    };
    return Permutable<Inference>{
        states.size() - 1,
        [&structure, permuted](const std::vector<std::size_t>& perm) {
          const StateSeq s = permuted(perm);
          return structure.f_i(s);
        },
        [&states](const std::vector<std::size_t>& perm) {
          for (std::size_t i = 0; i < perm.size(); ++i) {
            if (!(states[i + 1] == states[perm[i] + 1])) return false;
          }
          return true;
        }};
  };
  return search_permutations<Inference>(base_samples, prepare, budget, seed);
}

CheckResult check_last_observation_sufficiency(const LaFunction& f,
                                               const std::vector<ObservationSeq>& samples) {
  std::vector<Inference> outputs;
  outputs.reserve(samples.size());
  for (const auto& s : samples) outputs.push_back(s.empty() ? Inference{} : f(s));

  auto history_differs = [](const ObservationSeq& a, const ObservationSeq& b) {
    if (a.size() != b.size()) return true;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
      if (!(a[i].o == b[i].o)) return true;
    }
    return false;
  };

  std::size_t pairs = 0;
  std::optional<std::pair<std::size_t, std::size_t>> first_pair;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].empty()) continue;
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (samples[j].empty() || !(samples[i].back().o == samples[j].back().o)) continue;
      if (!history_differs(samples[i], samples[j])) continue;
      ++pairs;
      if (!first_pair) first_pair = {i, j};
      if (numeric_distance(outputs[i], outputs[j]) > kDifferenceThreshold) {
        CheckResult r;
        r.notes.push_back("LastObservationSufficiency: history changes the output (samples " +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
        return r;
      }
    }
  }
  if (!first_pair) {
    throw LaError(ErrorKind::InsufficientSamples,
                  "no two samples share a final observation while differing earlier");
  }

  const auto [i, j] = *first_pair;
  Witness w;
  w.sample_index = i;
  w.inputs = {samples[i], samples[j]};
  w.outputs = {describe(outputs[i]), describe(outputs[j])};
  CheckResult r = violation(Rule::LastObservationSufficiency, std::move(w),
                            "output is fixed by the final observation on all " +
                                std::to_string(pairs) + " history-varying pairs");
  bool constant = true;
  for (std::size_t k = 1; k < outputs.size() && constant; ++k) {
    if (numeric_distance(outputs[0], outputs[k]) > kDifferenceThreshold) constant = false;
  }
  if (constant) {
    r.notes.push_back("LastObservationSufficiency: degenerate, output is constant on all samples");
  }
  return r;
}

CheckResult check_prefix_consistency(const std::vector<Inference>& per_time_outputs,
                                     const LaFunction& f, const ObservationSeq& o) {
  const std::size_t n = std::min(per_time_outputs.size(), o.size());
  for (std::size_t t = 1; t <= n; ++t) {
    const Inference alone = f(o.prefix(t));
    if (!approx_equal(per_time_outputs[t - 1], alone, kEqualityTolerance)) {
      Witness w;
      w.inputs = {o};
      w.time_index = t;
      w.outputs = {describe(per_time_outputs[t - 1]), describe(alone)};
      return violation(Rule::PrefixInconsistency, std::move(w),
                       "output at t=" + std::to_string(t) +
                           " differs from the value computed on the prefix alone");
    }
  }
  return {};
}

CheckResult check_state_reachability(const LaStructure& structure, const FiniteSpec& spec,
                                     const std::vector<ObservationSeq>& samples,
                                     GapPolicy gap_policy) {
  std::size_t longest = 0;
  std::vector<Trace> traces;
  for (const auto& s : samples) {
    traces.push_back(run(structure, s, gap_policy));
    longest = std::max(longest, traces.back().states.size());
  }
  const ReachableSet reach = reachable_set(spec, longest == 0 ? 0 : longest - 1);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& states = traces[k].states;
    for (std::size_t step = 0; step < states.size(); ++step) {
      if (reach.per_step[step].count(states[step])) continue;
      Witness w;
      w.sample_index = k;
      w.inputs = {samples[k]};
      w.time_index = step;
      w.outputs = {describe(states[step])};
      return violation(Rule::UnreachableStateReference, std::move(w),
                       "state " + describe(states[step]) + " at step " + std::to_string(step) +
                           " is not reachable from s0");
    }
  }
  return {};
}

Subject subject_from_structure(const LaStructure& structure, GapPolicy gap_policy,
                               Sampler sampler) {
  Subject s;
  s.name = structure.name;
  s.function = implement_function(structure, gap_policy);
  s.structure = structure;
  s.gap_policy = gap_policy;
  s.per_time = [structure, gap_policy](const ObservationSeq& o) {
    std::vector<Inference> out;
    for (auto& ti : run(structure, o, gap_policy).inferences) out.push_back(std::move(ti.i));
    return out;
  };
  s.sampler = std::move(sampler);
  return s;
}

Subject subject_from_function(const LaFunction& f, Sampler sampler, PerTimeAdapter per_time) {
  Subject s;
  s.name = f.name;
  s.function = f;
  s.per_time = std::move(per_time);
  s.sampler = std::move(sampler);
  return s;
}

std::vector<ObservationSeq> report_samples(const Subject& subject, const ReportConfig& config) {
  std::vector<ObservationSeq> draws = subject.corpus;
  if (draws.empty()) {
    for (std::size_t i = 0; i < config.samples; ++i) {
      SplitMix64 rng = SplitMix64::stream(config.seed, i);
      draws.push_back(subject.sampler(rng));
    }
  }
  std::vector<ObservationSeq> out = draws;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const ObservationSeq& tail = draws[i];
    const ObservationSeq& head = draws[(i + 1) % draws.size()];
    if (tail.empty()) continue;
    ObservationSeq spliced;
    TimeIndex t = 1;
    for (std::size_t k = 0; k + 1 < head.size(); ++k) spliced.push_back(t++, head[k].o);
    spliced.push_back(t, tail.back().o);
    out.push_back(std::move(spliced));
  }
  return out;
}

ComplianceReport full_report(const Subject& subject, const ReportConfig& config) {
  ComplianceReport report;
  report.subject = subject.name;
  report.seed = config.seed;
  const std::vector<ObservationSeq> samples = report_samples(subject, config);

  auto record = [&](Rule rule, CheckResult r) {
    if (r.verdict == Verdict::Violation && r.violation) r.violation->rule = rule;
    report.verdicts[rule] = r.verdict;
    if (r.violation) report.witnesses.push_back(std::move(*r.violation));
    for (auto& n : r.notes) report.notes.push_back(std::move(n));
  };
  const bool black_box = !subject.structure.has_value();
  if (black_box) {
    report.notes.push_back(
        "black-box function: experience-level rules are evaluated on the function itself");
  }

  // Determinism
  const CheckResult det_inf = check_determinism(subject.function, samples, config.repeats);
  record(Rule::NonDeterministicExperience,
         black_box ? det_inf
                   : check_experience_determinism(*subject.structure, samples, config.repeats));
  record(Rule::NonDeterministicInference, det_inf);

  // Order sensitivity
  if (subject.order_invariant_by_design) {
    for (Rule r : {Rule::OrderInsensitiveExperience, Rule::OrderInsensitiveInference}) {
      CheckResult na;
      na.verdict = Verdict::NotApplicable;
      na.notes.push_back(std::string(to_string(r)) + ": order-invariant by design");
      record(r, na);
    }
  } else if (black_box) {
    const auto search = find_order_witness(subject.function, samples, config.budget, config.seed);
    record(Rule::OrderInsensitiveExperience,
           order_check(Rule::OrderInsensitiveExperience, search, samples));
    record(Rule::OrderInsensitiveInference,
           order_check(Rule::OrderInsensitiveInference, search, samples));
  } else {
    const auto exp_search =
        find_experience_order_witness(*subject.structure, samples, config.budget, config.seed);
    record(Rule::OrderInsensitiveExperience,
           order_check(Rule::OrderInsensitiveExperience, exp_search, samples));
    const auto state_search = find_state_order_witness(*subject.structure, samples, config.budget,
                                                       config.seed, subject.gap_policy);
    record(Rule::OrderInsensitiveInference,
           order_check(Rule::OrderInsensitiveInference, state_search, samples));
  }

  // Last-observation sufficiency
  try {
    record(Rule::LastObservationSufficiency,
           check_last_observation_sufficiency(subject.function, samples));
  } catch (const LaError& e) {
    if (e.kind() != ErrorKind::InsufficientSamples) throw;
    CheckResult na;
    na.verdict = Verdict::NotApplicable;
    na.notes.push_back(std::string("LastObservationSufficiency: ") + e.what());
    record(Rule::LastObservationSufficiency, na);
  }

  // Prefix consistency: first failing sample wins.
  CheckResult prefix;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    CheckResult r = check_prefix_consistency(per_time_of(subject, samples[k]), subject.function,
                                             samples[k]);
    if (r.verdict == Verdict::Violation) {
      r.violation->witness.sample_index = k;
      prefix = std::move(r);
      break;
    }
  }
  record(Rule::PrefixInconsistency, std::move(prefix));

  // Unreachable states
  if (subject.finite_spec && subject.structure) {
    record(Rule::UnreachableStateReference,
           check_state_reachability(*subject.structure, *subject.finite_spec, samples,
                                    subject.gap_policy));
  } else {
    CheckResult na;
    na.verdict = Verdict::NotApplicable;
    record(Rule::UnreachableStateReference, na);
  }
  return report;
}

bool replay(const Subject& subject, const Violation& v, const ReportConfig& config) {
  if (v.witness.inputs.empty()) return false;
  const ObservationSeq& o = v.witness.inputs.front();
  const bool black_box = !subject.structure.has_value();
  switch (v.rule) {
    case Rule::NonDeterministicExperience:
      if (!black_box) {
        return check_experience_determinism(*subject.structure, {o}, config.repeats).verdict ==
               Verdict::Violation;
      }
      [[fallthrough]];
    case Rule::NonDeterministicInference:
      return check_determinism(subject.function, {o}, config.repeats).verdict ==
             Verdict::Violation;
    case Rule::OrderInsensitiveExperience:
    case Rule::OrderInsensitiveInference: {
      OrderSearchResult search;
      if (black_box) {
        search = find_order_witness(subject.function, {o}, config.budget, config.seed);
      } else if (v.rule == Rule::OrderInsensitiveExperience) {
        search = find_experience_order_witness(*subject.structure, {o}, config.budget, config.seed);
      } else {
        search = find_state_order_witness(*subject.structure, {o}, config.budget, config.seed,
                                          subject.gap_policy);
      }
      return !search.witness.has_value();
    }
    case Rule::LastObservationSufficiency: {
      if (v.witness.inputs.size() != 2) return false;
      const auto& a = v.witness.inputs[0];
      const auto& b = v.witness.inputs[1];
      return !a.empty() && !b.empty() && a.back().o == b.back().o &&
             numeric_distance(subject.function(a), subject.function(b)) <= kDifferenceThreshold;
    }
    case Rule::PrefixInconsistency: {
      if (!v.witness.time_index) return false;
      const std::size_t t = *v.witness.time_index;
      const auto outputs = per_time_of(subject, o);
      if (t == 0 || t > outputs.size() || t > o.size()) return false;
      return !approx_equal(outputs[t - 1], subject.function(o.prefix(t)), kEqualityTolerance);
    }
    case Rule::UnreachableStateReference:
      if (!subject.structure || !subject.finite_spec) return false;
      return check_state_reachability(*subject.structure, *subject.finite_spec, {o},
                                      subject.gap_policy)
                 .verdict == Verdict::Violation;
  }
  return false;
}

}  // namespace lak
