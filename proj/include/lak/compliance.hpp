#pragma once

// Black-box behavioural checks of structures and LA functions: determinism,
// order sensitivity, last-observation sufficiency, prefix consistency and
// reference to unreachable states.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lak/random.hpp"
#include "lak/reachability.hpp"
#include "lak/structure.hpp"

namespace lak {

enum class Rule {
  NonDeterministicExperience,
  NonDeterministicInference,
  OrderInsensitiveExperience,
  OrderInsensitiveInference,
  LastObservationSufficiency,
  PrefixInconsistency,
  UnreachableStateReference,
};

inline constexpr Rule kAllRules[] = {
    Rule::NonDeterministicExperience, Rule::NonDeterministicInference,
    Rule::OrderInsensitiveExperience, Rule::OrderInsensitiveInference,
    Rule::LastObservationSufficiency, Rule::PrefixInconsistency,
    Rule::UnreachableStateReference,
};

enum class Verdict { Pass, Violation, NotApplicable };

std::string_view to_string(Rule rule);
std::string_view to_string(Verdict verdict);
Rule rule_from_string(std::string_view name);
Verdict verdict_from_string(std::string_view name);

/// Equality tolerance for outputs that should agree.
inline constexpr double kEqualityTolerance = 1e-12;
/// Outputs count as different only when they differ by more than this.
inline constexpr double kDifferenceThreshold = 1e-9;

/// The inputs that reproduce a violation.
struct Witness {
  std::size_t sample_index = 0;
  std::vector<ObservationSeq> inputs;
  std::vector<std::size_t> permutation;    ///< order rules: the permutation tried
  std::optional<std::size_t> time_index;   ///< prefix rules: 1-based position
  std::vector<std::string> outputs;        ///< rendered outputs, for reading only

  auto operator<=>(const Witness&) const = default;
};

struct Violation {
  Rule rule = Rule::NonDeterministicInference;
  Witness witness;
  std::string note;

  auto operator<=>(const Violation&) const = default;
};

struct CheckResult {
  Verdict verdict = Verdict::Pass;
  std::optional<Violation> violation;  ///< set exactly when verdict == Violation
  std::vector<std::string> notes;
};

/// Evaluates every sample `repeats` times (>= 2) and flags the first sample whose
/// outputs disagree beyond kEqualityTolerance.
CheckResult check_determinism(const LaFunction& f, const std::vector<ObservationSeq>& samples,
                              std::size_t repeats = 3);
/// Same check applied to the structure's f_e.
CheckResult check_experience_determinism(const LaStructure& structure,
                                         const std::vector<ObservationSeq>& samples,
                                         std::size_t repeats = 3);

enum class OrderEvidence {
  WitnessFound,
  NoneFoundWithinBudget,  ///< some sample was only sampled, not enumerated
  ExhaustivelyAbsent,     ///< every sample had all permutations enumerated
};

std::string_view to_string(OrderEvidence e);

struct OrderWitness {
  std::size_t sample_index = 0;
  std::vector<std::size_t> permutation;  ///< permuted[i] = original[permutation[i]]
  ObservationSeq original;
  std::string output_original;
  std::string output_permuted;
};

struct OrderSearchResult {
  OrderEvidence evidence = OrderEvidence::ExhaustivelyAbsent;
  std::optional<OrderWitness> witness;
  std::size_t permutations_tried = 0;
};

/// Sequences up to this length have all their permutations enumerated.
inline constexpr std::size_t kExhaustiveOrderLength = 6;

/// Searches for a non-identity permutation of some sample's observations that
/// changes f by more than kDifferenceThreshold. Longer samples get `budget`
/// seeded random permutations each. Permutations reorder payloads; time
/// indices stay in place. Throws InvalidParams when budget is 0.
OrderSearchResult find_order_witness(const LaFunction& f,
                                     const std::vector<ObservationSeq>& base_samples,
                                     std::size_t budget, std::uint64_t seed = 0);
/// The same search on the structure's f_e.
OrderSearchResult find_experience_order_witness(const LaStructure& structure,
                                                const std::vector<ObservationSeq>& base_samples,
                                                std::size_t budget, std::uint64_t seed = 0);
/// The same search on f_i, permuting the states s_1..s_t produced by running each
/// sample (s_0 stays first).
OrderSearchResult find_state_order_witness(const LaStructure& structure,
                                           const std::vector<ObservationSeq>& base_samples,
                                           std::size_t budget, std::uint64_t seed = 0,
                                           GapPolicy gap_policy = GapPolicy::NoTicks);

/// Flags f when, on every sample pair that shares the final observation but differs
/// earlier, the outputs agree: f factors through the newest observation on this
/// sample set. Throws InsufficientSamples when no such pair exists.
CheckResult check_last_observation_sufficiency(const LaFunction& f,
                                               const std::vector<ObservationSeq>& samples);

/// `per_time_outputs[t - 1]` is what the practice reported for time position t while
/// holding the full sequence `o`. Passes iff each equals f(O_{<=t}).
CheckResult check_prefix_consistency(const std::vector<Inference>& per_time_outputs,
                                     const LaFunction& f, const ObservationSeq& o);

/// Flags the first run state that lies outside S_reach(s0, k) of `spec` at its step k.
CheckResult check_state_reachability(const LaStructure& structure, const FiniteSpec& spec,
                                     const std::vector<ObservationSeq>& samples,
                                     GapPolicy gap_policy = GapPolicy::NoTicks);

using Sampler = std::function<ObservationSeq(SplitMix64&)>;
using PerTimeAdapter = std::function<std::vector<Inference>(const ObservationSeq&)>;

/// Anything the checks can be pointed at: a structure, or a black-box function with
/// an optional adapter exposing its per-time outputs on a full sequence.
struct Subject {
  std::string name;
  LaFunction function;
  std::optional<LaStructure> structure;
  GapPolicy gap_policy = GapPolicy::NoTicks;
  /// Defaults to evaluating `function` on each prefix.
  PerTimeAdapter per_time;
  Sampler sampler;
  /// Fixed draws used instead of the sampler when non-empty.
  std::vector<ObservationSeq> corpus;
  std::optional<FiniteSpec> finite_spec;
  /// Order-invariant by design: order rules are reported as not applicable.
  bool order_invariant_by_design = false;
};

Subject subject_from_structure(const LaStructure& structure, GapPolicy gap_policy,
                               Sampler sampler);
Subject subject_from_function(const LaFunction& f, Sampler sampler,
                              PerTimeAdapter per_time = {});

struct ReportConfig {
  std::uint64_t seed = 7;
  std::size_t samples = 40;
  std::size_t budget = 200;
  std::size_t repeats = 3;
};

struct ComplianceReport {
  std::string subject;
  std::map<Rule, Verdict> verdicts;
  std::vector<Violation> witnesses;  ///< one per violation verdict, in rule order
  std::vector<std::string> notes;
  std::uint64_t seed = 0;

  bool has_violation() const { return !witnesses.empty(); }
};

/// The samples full_report checks: `config.samples` draws (or the subject's corpus), followed by one spliced
/// variant per draw that keeps its final observation and swaps in another draw's
/// history.
std::vector<ObservationSeq> report_samples(const Subject& subject, const ReportConfig& config);

ComplianceReport full_report(const Subject& subject, const ReportConfig& config);

/// Re-evaluates a violation's witness against the subject; true when it still
/// demonstrates the violation.
bool replay(const Subject& subject, const Violation& violation, const ReportConfig& config);

}  // namespace lak
