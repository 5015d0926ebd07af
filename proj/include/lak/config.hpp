#pragma once

// Declarative description of a structure or practice, as read from a config file.

#include <cstddef>
#include <memory>
#include <string>
#include <variant>

#include "lak/instances/bkt.hpp"
#include "lak/instances/dashboard.hpp"
#include "lak/instances/predictive.hpp"
#include "lak/structure.hpp"

namespace lak {

/// One of the naive practices; `width` only matters for ex3_smooth.
struct NaiveParams {
  std::string name;
  std::size_t width = 3;
  auto operator<=>(const NaiveParams&) const = default;
};

struct StructureConfig;

/// Canonical structure of the function implemented by `inner`.
struct CanonicalParams {
  std::shared_ptr<const StructureConfig> inner;
};

struct StructureConfig {
  std::variant<bkt::BktParams, dashboard::DashboardConfig, predictive::PredictiveModel,
               CanonicalParams, NaiveParams>
      params;
  GapPolicy gap_policy = GapPolicy::TickPerMissingIndex;

  /// "bkt", "dashboard", "predictive", "canonical" or "naive:<name>".
  std::string instance() const;
};

bool operator==(const CanonicalParams& a, const CanonicalParams& b);
bool operator==(const StructureConfig& a, const StructureConfig& b);

}  // namespace lak
