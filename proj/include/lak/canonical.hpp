#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lak/structure.hpp"

namespace lak {

/// Structure whose experiences and states are the observation prefixes themselves:
/// s0 is the empty sequence, f_e is the identity, f_s replaces the state with the
/// newest prefix (identity on the empty experience), and f_i applies F to the last state.
struct CanonicalStructure {
  LaStructure structure;
};

CanonicalStructure build_canonical(const LaFunction& f);

struct CanonicalMismatch {
  std::size_t sample_index = 0;
  std::size_t prefix_length = 0;
  Inference expected;  ///< f(O_{<=t})
  Inference actual;    ///< inference produced by the structure
};

struct CanonicalReport {
  bool pass = true;
  std::size_t prefixes_checked = 0;
  std::optional<CanonicalMismatch> counterexample;
};

/// Checks, for every sample and every prefix length (including 0), that the
/// structure's inference equals f on that prefix. Numbers compare exactly unless
/// `tolerance` is positive. Returns the first mismatch in (sample, prefix) order.
CanonicalReport verify_canonical(const LaFunction& f, const CanonicalStructure& c,
                                 const std::vector<ObservationSeq>& obs_samples,
                                 double tolerance = 0.0);

}  // namespace lak
