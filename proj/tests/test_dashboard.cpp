#include "doctest.h"
#include "lak/errors.hpp"
#include "lak/instances/dashboard.hpp"
#include "lak/suite.hpp"

using namespace lak;
using namespace lak::dashboard;

namespace {

ObservationSeq sessions(const std::vector<Record>& records) {
  std::vector<Observation> obs;
  for (const auto& r : records) obs.push_back(Observation::record(r));
  return ObservationSeq::from_observations(obs);
}

const View& final_view(const Trace& tr) { return std::get<View>(tr.inferences.back().i.payload); }

std::vector<double> values(const Series& s) {
  std::vector<double> out;
  for (const auto& [t, x] : s) out.push_back(x);
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const LaError& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("cumulative learning time") {
  const auto s = dashboard_structure({{Metric::CumulativeLearningTime}, {}});
  const auto tr = run(s, sessions({{{"minutes", 10.0}}, {{"minutes", 20.0}}, {{"minutes", 15.0}}}));
  const auto& v = final_view(tr);
  REQUIRE(v.series.size() == 1);
  CHECK(values(v.series.at("cumulative_learning_time")) == std::vector<double>{10, 30, 45});
}

TEST_CASE("consecutive active days") {
  const auto s = dashboard_structure({{Metric::ConsecutiveActiveDays}, {}});
  const auto tr = run(s, sessions({{{"day", 1.0}}, {{"day", 2.0}}, {{"day", 4.0}}}));
  CHECK(values(final_view(tr).series.at("consecutive_active_days")) == std::vector<double>{1, 2, 1});
  const auto same_day = run(s, sessions({{{"day", 1.0}}, {{"day", 1.0}}, {{"day", 2.0}}}));
  CHECK(values(final_view(same_day).series.at("consecutive_active_days")) ==
        std::vector<double>{1, 1, 2});
}

TEST_CASE("per-unit achievement rate") {
  const DashboardConfig c{{Metric::PerUnitAchievementRate},
                          {{"t1", "A"}, {"t2", "A"}, {"t3", "A"}, {"t4", "A"}}};
  const auto s = dashboard_structure(c);
  const auto tr = run(s, sessions({{{"task", std::string("t1")}, {"done", 1.0}},
                                   {{"task", std::string("t3")}, {"done", 0.0}},
                                   {{"task", std::string("t2")}, {"done", 1.0}},
                                   {{"task", std::string("t1")}, {"done", 1.0}}}));
  CHECK(values(final_view(tr).series.at("per_unit_achievement_rate/A")) ==
        std::vector<double>{0.25, 0.25, 0.5, 0.5});
}

TEST_CASE("config and schema errors") {
  CHECK(kind_of([] { dashboard_structure({}); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] {
          dashboard_structure({{Metric::CumulativeLearningTime, Metric::CumulativeLearningTime}, {}});
        }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { dashboard_structure({{Metric::PerUnitAchievementRate}, {}}); }) ==
        ErrorKind::InvalidParams);
  const auto s = dashboard_structure({{Metric::CumulativeLearningTime}, {}});
  CHECK(kind_of([&] { run(s, sessions({{{"day", 1.0}}})); }) == ErrorKind::SchemaMismatch);
  const auto u = dashboard_structure({{Metric::PerUnitAchievementRate}, {{"t1", "A"}}});
  CHECK(kind_of([&] { run(u, sessions({{{"task", std::string("t9")}, {"done", 1.0}}})); }) ==
        ErrorKind::SchemaMismatch);
  CHECK(metric_from_string("consecutive_active_days") == Metric::ConsecutiveActiveDays);
  CHECK(kind_of([] { metric_from_string("clicks"); }) == ErrorKind::SchemaError);
}

TEST_CASE("views are recomputable from the raw sessions alone") {
  const auto config = suite::builtin_dashboard_config();
  const auto s = dashboard_structure(config);
  const auto sampler = suite::session_sampler(10);
  for (std::uint64_t k = 0; k < 100; ++k) {
    SplitMix64 rng = SplitMix64::stream(31, k);
    ObservationSeq raw = sampler(rng);
    // Spread the sessions out in time; ticks must not add points.
    ObservationSeq o;
    for (std::size_t i = 0; i < raw.size(); ++i) o.push_back(2 * i + 1, raw[i].o);
    const Trace tr = run(s, o, GapPolicy::TickPerMissingIndex);
    const View& v = final_view(tr);
    CHECK(v.series.size() == 4);

    double cum = 0.0, streak = 0.0, prev_day = 0.0;
    std::set<std::string> done;
    for (std::size_t i = 0; i < o.size(); ++i) {
      const Record& r = o[i].o.as_record();
      const double day = std::get<double>(r.at("day"));
      cum += std::get<double>(r.at("minutes"));
      if (i == 0 || day - prev_day > 1.0) {
        streak = 1.0;
      } else if (day - prev_day == 1.0) {
        streak += 1.0;
      }
      prev_day = day;
      if (std::get<double>(r.at("done")) != 0.0) done.insert(std::get<std::string>(r.at("task")));
      const double a = double(done.count("t1") + done.count("t2")) / 2.0;
      const double b = double(done.count("t3") + done.count("t4")) / 2.0;
      const TimeIndex t = o[i].t;
      CHECK(v.series.at("cumulative_learning_time")[i] == std::make_pair(t, cum));
      CHECK(v.series.at("consecutive_active_days")[i] == std::make_pair(t, streak));
      CHECK(v.series.at("per_unit_achievement_rate/A")[i] == std::make_pair(t, a));
      CHECK(v.series.at("per_unit_achievement_rate/B")[i] == std::make_pair(t, b));
    }
  }
}
