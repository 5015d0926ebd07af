#pragma once

// Seeded synthetic learners: BKT-governed response traces and labeled activity
// traces for the predictive model.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lak/instances/bkt.hpp"
#include "lak/instances/predictive.hpp"

namespace lak::tracegen {

struct BktGenerator {
  bkt::BktParams params;
  auto operator<=>(const BktGenerator&) const = default;
};

/// Each learner has a propensity q ~ U(0, 1) and is active at each step with
/// probability q (observed as 1 or 0). The label is 1 with probability
/// logistic(signal_strength * (activity_mean - base_rate)).
struct DropoutGenerator {
  double base_rate = 0.5;
  double signal_strength = 10.0;
  auto operator<=>(const DropoutGenerator&) const = default;
};

struct GenConfig {
  std::uint64_t seed = 7;
  std::size_t n_learners = 1;
  std::size_t trace_len = 1;
  std::variant<BktGenerator, DropoutGenerator> generator;
  auto operator<=>(const GenConfig&) const = default;
};

/// Throws InvalidParams unless n_learners >= 1, trace_len >= 1 and the
/// generator parameters are valid.
void validate(const GenConfig& config);

/// Ground truth kept next to each trace. Only the generator and its tests read it.
struct HiddenTruth {
  std::vector<bool> mastery;         ///< bkt: mastery at each observation time
  std::optional<double> propensity;  ///< dropout: activity probability
  auto operator<=>(const HiddenTruth&) const = default;
};

struct GeneratedLearner {
  std::string learner_id;
  ObservationSeq obs;
  std::optional<int> label;
  HiddenTruth truth;
  auto operator<=>(const GeneratedLearner&) const = default;
};

/// Learner i draws from SplitMix64::stream(seed, i), so the corpus is fixed by the config.
std::vector<GeneratedLearner> generate(const GenConfig& config);

std::string learner_id(std::size_t index);

/// Observation sequences of a corpus, in learner order.
std::vector<ObservationSeq> sequences(const std::vector<GeneratedLearner>& corpus);
/// Labeled sequences for training; throws InvalidParams when a learner has no label.
std::vector<predictive::LabeledSeq> labeled(const std::vector<GeneratedLearner>& corpus);

}  // namespace lak::tracegen
