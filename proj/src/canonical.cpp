#include "lak/canonical.hpp"

#include "lak/errors.hpp"

namespace lak {

CanonicalStructure build_canonical(const LaFunction& f) {
  LaStructure s;
  s.name = "canonical(" + f.name + ")";
  s.obs_space = {"any observation", {}};
  s.exp_space = {"observation sequences",
                 [](const Experience& e) {
                   return std::holds_alternative<ObservationSeq>(e.payload);
                 }};
  s.state_space = {"observation sequences",
                   [](const State& st) {
                     return std::holds_alternative<ObservationSeq>(st.payload);
                   }};
  s.inf_space = {"codomain of " + f.name, {}};
  s.s0 = State{ObservationSeq{}};
  s.f_e = [](const ObservationSeq& obs) { return Experience{obs}; };
  s.f_s = [](const State& prev, const Experience& e) {
    if (e.is_empty()) return prev;
    const auto* seq = std::get_if<ObservationSeq>(&e.payload);
    if (seq == nullptr) {
      throw LaError(ErrorKind::EvaluationError,
                    "canonical transition expects a sequence experience, got " + describe(e));
    }
    return State{*seq};
  };
  s.f_i = [f](std::span<const State> states) {
    return f(std::get<ObservationSeq>(states.back().payload));
  };
  return {std::move(s)};
}

CanonicalReport verify_canonical(const LaFunction& f, const CanonicalStructure& c,
                                 const std::vector<ObservationSeq>& obs_samples,
                                 double tolerance) {
  CanonicalReport report;
  const LaStructure& s = c.structure;
  for (std::size_t k = 0; k < obs_samples.size(); ++k) {
    const ObservationSeq& sample = obs_samples[k];
    const Trace trace = run(s, sample, GapPolicy::NoTicks);

    auto compare = [&](std::size_t len, const Inference& actual) {
      ++report.prefixes_checked;
      Inference expected = f(sample.prefix(len));
      if (!approx_equal(expected, actual, tolerance)) {
        report.pass = false;
        report.counterexample = CanonicalMismatch{k, len, std::move(expected), actual};
        return false;
      }
      return true;
    };

    const StateSeq initial{s.s0};
    if (!compare(0, s.f_i(initial))) return report;
    for (std::size_t len = 1; len <= sample.size(); ++len) {
      if (!compare(len, trace.inferences[len - 1].i)) return report;
    }
  }
  return report;
}

}  // namespace lak
