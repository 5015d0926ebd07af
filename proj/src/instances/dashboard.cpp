#include "lak/instances/dashboard.hpp"

#include <algorithm>
#include <set>

#include "lak/errors.hpp"

namespace lak::dashboard {
namespace {

const char* const kStateTime = "t";
const char* const kCumMinutes = "cum_minutes";
const char* const kStreak = "streak";
const char* const kLastDay = "last_day";
const char* const kDayGap = "day_gap";
const std::string kDonePrefix = "done:";

bool uses(const DashboardConfig& c, Metric m) {
  return std::find(c.metrics.begin(), c.metrics.end(), m) != c.metrics.end();
}

double number_field(const Record& r, const char* name) {
  auto it = r.find(name);
  if (it == r.end() || !std::holds_alternative<double>(it->second)) {
    throw LaError(ErrorKind::SchemaMismatch,
                  std::string("observation lacks numeric field '") + name + "'");
  }
  return std::get<double>(it->second);
}

std::string symbol_field(const Record& r, const char* name) {
  auto it = r.find(name);
  if (it == r.end() || !std::holds_alternative<std::string>(it->second)) {
    throw LaError(ErrorKind::SchemaMismatch,
                  std::string("observation lacks symbol field '") + name + "'");
  }
  return std::get<std::string>(it->second);
}

double get(const Record& r, const std::string& name, double fallback = 0.0) {
  auto it = r.find(name);
  return it == r.end() ? fallback : std::get<double>(it->second);
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::CumulativeLearningTime: return "cumulative_learning_time";
    case Metric::ConsecutiveActiveDays: return "consecutive_active_days";
    case Metric::PerUnitAchievementRate: return "per_unit_achievement_rate";
  }
  return "";
}

Metric metric_from_string(std::string_view name) {
  for (Metric m : {Metric::CumulativeLearningTime, Metric::ConsecutiveActiveDays,
                   Metric::PerUnitAchievementRate}) {
    if (to_string(m) == name) return m;
  }
  throw LaError(ErrorKind::SchemaError, "unknown dashboard metric '" + std::string(name) + "'");
}

std::string series_name(Metric m, const std::string& unit) {
  std::string name(to_string(m));
  if (m == Metric::PerUnitAchievementRate) name += "/" + unit;
  return name;
}

LaStructure dashboard_structure(const DashboardConfig& config) {
  if (config.metrics.empty()) {
    throw LaError(ErrorKind::InvalidParams, "dashboard needs at least one metric");
  }
  if (std::set<Metric>(config.metrics.begin(), config.metrics.end()).size() !=
      config.metrics.size()) {
    throw LaError(ErrorKind::InvalidParams, "dashboard metrics must be distinct");
  }
  const bool per_unit = uses(config, Metric::PerUnitAchievementRate);
  if (per_unit && config.unit_map.empty()) {
    throw LaError(ErrorKind::InvalidParams, "per-unit achievement needs a task -> unit map");
  }

  std::map<std::string, double> unit_sizes;
  for (const auto& [task, unit] : config.unit_map) unit_sizes[unit] += 1.0;

  LaStructure s;
  s.name = "dashboard";
  s.obs_space = {"session records", [](const Observation& o) { return o.is_record(); }};
  s.exp_space = {"feature records", [](const Experience& e) {
                   return std::holds_alternative<Record>(e.payload);
                 }};
  s.state_space = {"accumulator records", [](const State& st) {
                     return std::holds_alternative<Record>(st.payload);
                   }};
  s.inf_space = {"dashboard views", [](const Inference& i) {
                   return std::holds_alternative<View>(i.payload);
                 }};
  s.s0 = State{Record{{kStateTime, 0.0}, {kCumMinutes, 0.0}, {kStreak, 0.0}}};

  s.f_e = [config](const ObservationSeq& obs) {
    const Record& now = obs.back().o.as_record();
    Record e{{kStateTime, static_cast<double>(obs.back().t)}};
    if (uses(config, Metric::CumulativeLearningTime)) {
      e[kMinutesField] = number_field(now, kMinutesField);
    }
    if (uses(config, Metric::ConsecutiveActiveDays)) {
      const double day = number_field(now, kDayField);
      e[kDayField] = day;
      if (obs.size() > 1) {
        e[kDayGap] = day - number_field(obs[obs.size() - 2].o.as_record(), kDayField);
      }
    }
    if (uses(config, Metric::PerUnitAchievementRate)) {
      const std::string task = symbol_field(now, kTaskField);
      if (!config.unit_map.count(task)) {
        throw LaError(ErrorKind::SchemaMismatch, "task '" + task + "' has no unit");
      }
      e[kTaskField] = task;
      e[kDoneField] = number_field(now, kDoneField) != 0.0 ? 1.0 : 0.0;
    }
    return Experience{std::move(e)};
  };

  s.f_s = [](const State& prev, const Experience& e) {
    if (e.is_empty()) return prev;
    Record next = std::get<Record>(prev.payload);
    const Record& x = std::get<Record>(e.payload);
    next[kStateTime] = get(x, kStateTime);
    if (x.count(kMinutesField)) next[kCumMinutes] = get(next, kCumMinutes) + get(x, kMinutesField);
    if (x.count(kDayField)) {
      double streak = 1.0;
      if (auto gap = x.find(kDayGap); gap != x.end()) {
        const double d = std::get<double>(gap->second);
        if (d == 0.0) {
          streak = std::max(1.0, get(next, kStreak));
        } else if (d == 1.0) {
          streak = get(next, kStreak) + 1.0;
        }
      }
      next[kStreak] = streak;
      next[kLastDay] = get(x, kDayField);
    }
    if (x.count(kTaskField) && get(x, kDoneField) != 0.0) {
      next[kDonePrefix + std::get<std::string>(x.at(kTaskField))] = 1.0;
    }
    return State{std::move(next)};
  };

  s.f_i = [config, unit_sizes](std::span<const State> states) {
    View view;
    for (Metric m : config.metrics) {
      if (m == Metric::PerUnitAchievementRate) {
        for (const auto& [unit, size] : unit_sizes) view.series[series_name(m, unit)];
      } else {
        view.series[series_name(m)];
      }
    }
    double last_t = 0.0;
    for (const State& st : states) {
      const Record& r = std::get<Record>(st.payload);
      const double t = get(r, kStateTime);
      if (t == last_t) continue;  // s0 and empty-experience ticks
      last_t = t;
      const auto ti = static_cast<TimeIndex>(t);
      for (Metric m : config.metrics) {
        switch (m) {
          case Metric::CumulativeLearningTime:
            view.series[series_name(m)].emplace_back(ti, get(r, kCumMinutes));
            break;
          case Metric::ConsecutiveActiveDays:
            view.series[series_name(m)].emplace_back(ti, get(r, kStreak));
            break;
          case Metric::PerUnitAchievementRate: {
            std::map<std::string, double> done;
            for (const auto& [task, unit] : config.unit_map) {
              done[unit] += get(r, kDonePrefix + task);
            }
            for (const auto& [unit, size] : unit_sizes) {
              view.series[series_name(m, unit)].emplace_back(ti, done[unit] / size);
            }
            break;
          }
        }
      }
    }
    return Inference{std::move(view)};
  };
  return s;
}

}  // namespace lak::dashboard
