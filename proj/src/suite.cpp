#include "lak/suite.hpp"

#include "lak/canonical.hpp"
#include "lak/errors.hpp"
#include "lak/instances/naive.hpp"
#include "lak/tracegen.hpp"

namespace lak::suite {
namespace {

std::size_t draw_length(SplitMix64& rng, std::size_t max_len) {
  return 1 + static_cast<std::size_t>(rng.below(max_len));
}

const std::vector<std::string> kTasks = {"t1", "t2", "t3", "t4"};

Subject naive_subject(const NaiveParams& p) {
  if (p.name == naive::kRate) return subject_from_function(naive::ex1_rate(), binary_sampler());
  if (p.name == naive::kLast) return subject_from_function(naive::ex2_last(), binary_sampler());
  if (p.name == naive::kSmooth) {
    const std::size_t width = p.width;
    return subject_from_function(
        naive::ex3_smooth(width), binary_sampler(),
        [width](const ObservationSeq& o) { return naive::ex3_smooth_series(o, width); });
  }
  throw LaError(ErrorKind::SchemaError, "unknown naive practice '" + p.name + "'");
}

}  // namespace

Sampler binary_sampler(std::size_t max_len) {
  return [max_len](SplitMix64& rng) {
    const std::size_t n = draw_length(rng, max_len);
    ObservationSeq o;
    for (std::size_t t = 1; t <= n; ++t) {
      o.push_back(t, Observation::symbol(rng.bernoulli(0.5) ? bkt::kCorrect : bkt::kIncorrect));
    }
    return o;
  };
}

Sampler session_sampler(std::size_t max_len) {
  return [max_len](SplitMix64& rng) {
    const std::size_t n = draw_length(rng, max_len);
    ObservationSeq o;
    double day = 1.0;
    for (std::size_t t = 1; t <= n; ++t) {
      if (t > 1) day += static_cast<double>(rng.below(3));
      Record r;
      r[dashboard::kMinutesField] = 5.0 * static_cast<double>(1 + rng.below(12));
      r[dashboard::kDayField] = day;
      r[dashboard::kTaskField] = kTasks[rng.below(kTasks.size())];
      r[dashboard::kDoneField] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      o.push_back(t, Observation::record(std::move(r)));
    }
    return o;
  };
}

Sampler activity_sampler(std::size_t max_len, std::vector<std::string> channels) {
  return [max_len, channels](SplitMix64& rng) {
    const std::size_t n = draw_length(rng, max_len);
    const double q = rng.uniform();
    ObservationSeq o;
    for (std::size_t t = 1; t <= n; ++t) {
      if (channels.empty()) {
        o.push_back(t, Observation::number(rng.bernoulli(q) ? 1.0 : 0.0));
      } else {
        Record r;
        for (const auto& c : channels) r[c] = rng.bernoulli(q) ? 1.0 : 0.0;
        o.push_back(t, Observation::record(std::move(r)));
      }
    }
    return o;
  };
}

bkt::BktParams builtin_bkt_params() { return bkt::BktParams{0.5, 0.3, 0.2, 0.1, 0.0}; }

dashboard::DashboardConfig builtin_dashboard_config() {
  using dashboard::Metric;
  return {{Metric::CumulativeLearningTime, Metric::ConsecutiveActiveDays,
           Metric::PerUnitAchievementRate},
          {{"t1", "A"}, {"t2", "A"}, {"t3", "B"}, {"t4", "B"}}};
}

predictive::PredictiveModel builtin_predictive_model() {
  tracegen::GenConfig gen;
  gen.seed = 7;
  gen.n_learners = 60;
  gen.trace_len = 8;
  gen.generator = tracegen::DropoutGenerator{0.5, 10.0};
  predictive::TrainHyper hyper;
  hyper.epochs = 100;
  return predictive::train_predictive(tracegen::labeled(tracegen::generate(gen)), hyper).model;
}

std::vector<Subject> builtin_subjects() {
  std::vector<Subject> out;
  out.push_back(subject_from_structure(bkt::bkt_structure(builtin_bkt_params()),
                                       GapPolicy::NoTicks, binary_sampler()));
  out.push_back(subject_from_structure(dashboard::dashboard_structure(builtin_dashboard_config()),
                                       GapPolicy::NoTicks, session_sampler()));
  out.push_back(subject_from_structure(
      predictive::predictive_structure(builtin_predictive_model()), GapPolicy::NoTicks,
      activity_sampler()));
  for (const char* name : {naive::kRate, naive::kLast, naive::kSmooth}) {
    out.push_back(naive_subject(NaiveParams{name, 3}));
  }
  return out;
}

Subject builtin_subject(const std::string& name) {
  for (auto& s : builtin_subjects()) {
    if (s.name == name) return s;
  }
  throw LaError(ErrorKind::SchemaError, "unknown builtin subject '" + name + "'");
}

std::vector<ComplianceReport> run_builtin_suite(const ReportConfig& config) {
  std::vector<ComplianceReport> out;
  for (const auto& s : builtin_subjects()) out.push_back(full_report(s, config));
  return out;
}

Subject instantiate(const StructureConfig& config) {
  const GapPolicy gap = config.gap_policy;
  return std::visit(
      [gap](const auto& p) -> Subject {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, bkt::BktParams>) {
          return subject_from_structure(bkt::bkt_structure(p), gap, binary_sampler());
        } else if constexpr (std::is_same_v<P, dashboard::DashboardConfig>) {
          return subject_from_structure(dashboard::dashboard_structure(p), gap,
                                        session_sampler());
        } else if constexpr (std::is_same_v<P, predictive::PredictiveModel>) {
          return subject_from_structure(predictive::predictive_structure(p), gap,
                                        activity_sampler(8, p.channels));
        } else if constexpr (std::is_same_v<P, CanonicalParams>) {
          if (!p.inner) throw LaError(ErrorKind::SchemaError, "canonical config lacks a function");
          Subject inner = instantiate(*p.inner);
          CanonicalStructure c = build_canonical(inner.function);
          c.structure.name = "canonical(" + inner.name + ")";
          return subject_from_structure(c.structure, gap, inner.sampler);
        } else {
          return naive_subject(p);
        }
      },
      config.params);
}

}  // namespace lak::suite
