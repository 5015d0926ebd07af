#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "lak/structure.hpp"

namespace lak::naive {

inline constexpr const char* kRate = "ex1_rate";
inline constexpr const char* kLast = "ex2_last";
inline constexpr const char* kSmooth = "ex3_smooth";

inline constexpr const char* kUnderstood = "understood";
inline constexpr const char* kNotUnderstood = "not understood";

/// Score of one response: correct = 1, incorrect = 0, numbers pass through.
double score(const Observation& o);

/// Share of correct responses in the whole sequence (0 for the empty sequence).
LaFunction ex1_rate();

/// Label read off the newest response alone.
LaFunction ex2_last();

/// Centered moving average of the scores with a window of `width` (odd) positions,
/// truncated at the ends. As a function it evaluates the newest position of its input.
LaFunction ex3_smooth(std::size_t width = 3);

/// Per-position outputs of the centered smoother computed over the whole sequence,
/// so interior outputs already use later observations.
std::vector<Inference> ex3_smooth_series(const ObservationSeq& obs, std::size_t width = 3);

LaPractice naive_practices();

}  // namespace lak::naive
