#pragma once

#include <map>
#include <string>
#include <vector>

#include "lak/structure.hpp"

namespace lak::dashboard {

enum class Metric {
  CumulativeLearningTime,
  ConsecutiveActiveDays,
  PerUnitAchievementRate,
};

std::string_view to_string(Metric m);
Metric metric_from_string(std::string_view name);

// Observation record fields read by the metrics.
inline constexpr const char* kMinutesField = "minutes";
inline constexpr const char* kDayField = "day";
inline constexpr const char* kTaskField = "task";
inline constexpr const char* kDoneField = "done";

struct DashboardConfig {
  std::vector<Metric> metrics;
  /// task id -> unit label; the denominator of a unit's rate is its task count.
  std::map<std::string, std::string> unit_map;

  auto operator<=>(const DashboardConfig&) const = default;
};

/// Series name for a metric; per-unit rates are named "per_unit_achievement_rate/<unit>".
std::string series_name(Metric m, const std::string& unit = {});

/// Observations are records. f_e extracts the newest session's features plus the
/// day gap to the previous session; f_s accumulates running totals starting from
/// zeroed accumulators; f_i projects the state history to one series per metric,
/// with a point at every observation time. Throws InvalidParams for an empty
/// metric list; runs throw SchemaMismatch when a needed field is missing.
LaStructure dashboard_structure(const DashboardConfig& config);

}  // namespace lak::dashboard
