#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lak/values.hpp"

namespace lak {

/// Descriptor of a value universe: a name plus a membership predicate.
/// An empty predicate accepts everything.
template <class T>
struct ValueSpace {
  std::string description;
  std::function<bool(const T&)> contains;

  bool accepts(const T& value) const { return !contains || contains(value); }
};

using ExperienceMap = std::function<Experience(const ObservationSeq&)>;
using TransitionMap = std::function<State(const State&, const Experience&)>;
using InferenceMap = std::function<Inference(std::span<const State>)>;

enum class SpecKind { External, Internal };

/// Which components are fixed by the observational setting and which are designed.
struct SpecKinds {
  SpecKind time_domain = SpecKind::External;
  SpecKind obs_space = SpecKind::External;
  SpecKind exp_space = SpecKind::Internal;
  SpecKind state_space = SpecKind::Internal;
  SpecKind inf_space = SpecKind::External;
  SpecKind s0 = SpecKind::External;
  SpecKind f_e = SpecKind::Internal;
  SpecKind f_s = SpecKind::Internal;
  SpecKind f_i = SpecKind::Internal;
};

/// The nine-tuple (T, O, E, S, I, s0, f_e, f_s, f_i). The time domain is always
/// an initial segment of the naturals and is represented by the time indices
/// carried in observation sequences.
struct LaStructure {
  std::string name;
  ValueSpace<Observation> obs_space;
  ValueSpace<Experience> exp_space;
  ValueSpace<State> state_space;
  ValueSpace<Inference> inf_space;
  State s0;
  ExperienceMap f_e;
  TransitionMap f_s;
  InferenceMap f_i;
  SpecKinds spec_kinds;
};

/// Throws InvalidParams if s0 is outside the state space or a map is missing.
void validate(const LaStructure& structure);

/// A deterministic mapping from observation sequences to inference values.
struct LaFunction {
  std::string name;
  std::function<Inference(const ObservationSeq&)> eval;

  Inference operator()(const ObservationSeq& obs) const { return eval(obs); }
};

/// A non-empty named family of LA functions.
class LaPractice {
 public:
  /// Throws InvalidParams when `functions` is empty.
  explicit LaPractice(std::vector<LaFunction> functions);

  const LaFunction& at(const std::string& name) const;
  const std::vector<LaFunction>& functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }

 private:
  std::vector<LaFunction> functions_;
};

enum class GapPolicy {
  TickPerMissingIndex,  ///< one empty-experience transition per absent time index
  NoTicks,
};

struct TimedExperience {
  TimeIndex t = 0;
  Experience e;
  auto operator<=>(const TimedExperience&) const = default;
};

struct TimedInference {
  TimeIndex t = 0;
  Inference i;
  auto operator<=>(const TimedInference&) const = default;
};

/// Histories produced by running a structure over an observation sequence.
/// `states[k]` is reached at time `state_times[k]`; experiences[k - 1] produced it.
struct Trace {
  ObservationSeq observations;
  std::vector<TimedExperience> experiences;
  StateSeq states;
  std::vector<TimeIndex> state_times;
  std::vector<TimedInference> inferences;

  auto operator<=>(const Trace&) const = default;
};

struct StepResult {
  Experience experience;
  State state;
};

/// One observation step: e = f_e(obs_so_far), s = f_s(prev_state, e).
/// Throws MalformedObservation if the newest observation is outside the
/// observation space; exceptions escaping user maps become EvaluationError.
StepResult step(const LaStructure& structure, const State& prev_state,
                const ObservationSeq& obs_so_far);

/// f_s(prev_state, empty experience).
State tick(const LaStructure& structure, const State& prev_state);

/// Folds the structure over `obs`. Inferences are recorded after every
/// observation step, never after ticks.
Trace run(const LaStructure& structure, const ObservationSeq& obs,
          GapPolicy gap_policy = GapPolicy::TickPerMissingIndex);

/// O -> last inference of run(structure, O); for empty O this is f_i((s0)).
LaFunction implement_function(const LaStructure& structure,
                              GapPolicy gap_policy = GapPolicy::TickPerMissingIndex);

/// Re-applies f_s along the recorded experiences and checks it reproduces `trace.states`.
bool replay_matches(const LaStructure& structure, const Trace& trace);

std::string_view to_string(GapPolicy policy);
GapPolicy gap_policy_from_string(std::string_view name);

}  // namespace lak
