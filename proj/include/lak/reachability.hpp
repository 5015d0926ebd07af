#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lak/values.hpp"

namespace lak {

/// A finite transition system over explicitly enumerated states and experiences.
/// The empty experience is always available in addition to `experiences`.
struct FiniteSpec {
  std::vector<State> states;
  std::vector<Experience> experiences;  ///< non-empty experiences only
  std::function<State(const State&, const Experience&)> transition;
  State s0;
  /// Set by quantizers that approximate a continuous state space.
  bool approximate = false;
  std::string description;
};

/// A word over experiences; std::nullopt stands for the empty experience.
using ExperienceWord = std::vector<std::optional<Experience>>;

struct ReachWitness {
  State state;
  ExperienceWord word;
};

struct ReachableSet {
  TimeIndex horizon = 0;
  /// per_step[k] = states reachable from s0 by words of exactly k experiences.
  std::vector<std::set<State>> per_step;
  /// First k with per_step[k] == per_step[k + 1], searched past the horizon if needed.
  std::optional<std::size_t> fixpoint_step;
  /// Minimal-length witness for each state in per_step.back(), in state order.
  std::vector<ReachWitness> witnesses;

  /// True when every step is contained in the next one.
  bool is_monotone() const;
};

/// Dense transition table: `next[s][e]` with e == experiences.size() the empty experience.
struct TransitionTable {
  std::vector<std::vector<std::size_t>> next;
  std::size_t s0 = 0;
};

/// Evaluates the transition on every (state, experience) pair. Throws
/// NonClosedTransition if an image is not an enumerated state, UnknownState if
/// s0 is not enumerated.
TransitionTable tabulate(const FiniteSpec& spec);

ReachableSet reachable_set(const FiniteSpec& spec, TimeIndex horizon);

/// Throws UnknownState if `s` is not in spec.states.
bool is_reachable(const FiniteSpec& spec, const State& s, TimeIndex horizon);

/// States never reached at any finite step, in enumeration order.
std::vector<State> find_unreachable(const FiniteSpec& spec);

/// Folds the transition over a word starting from s0.
State replay_word(const FiniteSpec& spec, const ExperienceWord& word);

/// Demo: states {0,1,2,3}, experience "a", a saturates at 2, empty experience is identity.
FiniteSpec saturating_demo_spec();

}  // namespace lak
