#include "lak/structure.hpp"

#include <exception>

#include "lak/errors.hpp"

namespace lak {
namespace {

// Runs a user-supplied map, converting foreign exceptions to EvaluationError.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const LaError&) {
    throw;
  } catch (const std::exception& e) {
    throw LaError(ErrorKind::EvaluationError, std::string(what) + " failed: " + e.what());
  }
}

}  // namespace

void validate(const LaStructure& structure) {
  if (!structure.f_e || !structure.f_s || !structure.f_i) {
    throw LaError(ErrorKind::InvalidParams, structure.name + ": f_e, f_s and f_i must all be set");
  }
  if (!structure.state_space.accepts(structure.s0)) {
    throw LaError(ErrorKind::InvalidParams,
                  structure.name + ": s0 " + describe(structure.s0) + " is not in " +
                      structure.state_space.description);
  }
}

LaPractice::LaPractice(std::vector<LaFunction> functions) : functions_(std::move(functions)) {
  if (functions_.empty()) {
    throw LaError(ErrorKind::InvalidParams, "an LA practice needs at least one function");
  }
}

const LaFunction& LaPractice::at(const std::string& name) const {
  for (const auto& f : functions_) {
    if (f.name == name) return f;
  }
  throw LaError(ErrorKind::InvalidParams, "practice has no function named '" + name + "'");
}

StepResult step(const LaStructure& structure, const State& prev_state,
                const ObservationSeq& obs_so_far) {
  if (!obs_so_far.empty() && !structure.obs_space.accepts(obs_so_far.back().o)) {
    throw LaError(ErrorKind::MalformedObservation,
                  "observation " + describe(obs_so_far.back().o) + " at t=" +
                      std::to_string(obs_so_far.back().t) + " is not in " +
                      structure.obs_space.description);
  }
  Experience e = guarded("f_e", [&] { return structure.f_e(obs_so_far); });
  State s = guarded("f_s", [&] { return structure.f_s(prev_state, e); });
  return {std::move(e), std::move(s)};
}

State tick(const LaStructure& structure, const State& prev_state) {
  return guarded("f_s", [&] { return structure.f_s(prev_state, Experience::none()); });
}

Trace run(const LaStructure& structure, const ObservationSeq& obs, GapPolicy gap_policy) {
  Trace trace;
  trace.observations = obs;
  trace.states.push_back(structure.s0);
  trace.state_times.push_back(0);

  TimeIndex now = 0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const TimeIndex t = obs[k].t;
    if (t <= now) {
      throw LaError(ErrorKind::NonMonotoneTime,
                    "observation time " + std::to_string(t) + " must exceed " +
                        std::to_string(now));
    }
    if (gap_policy == GapPolicy::TickPerMissingIndex) {
      for (TimeIndex gap = now + 1; gap < t; ++gap) {
        trace.states.push_back(tick(structure, trace.states.back()));
        trace.state_times.push_back(gap);
        trace.experiences.push_back({gap, Experience::none()});
      }
    }
    auto [e, s] = step(structure, trace.states.back(), obs.prefix(k + 1));
    trace.experiences.push_back({t, std::move(e)});
    trace.states.push_back(std::move(s));
    trace.state_times.push_back(t);
    Inference i = guarded("f_i", [&] { return structure.f_i(trace.states); });
    trace.inferences.push_back({t, std::move(i)});
    now = t;
  }
  return trace;
}

LaFunction implement_function(const LaStructure& structure, GapPolicy gap_policy) {
  return {structure.name, [structure, gap_policy](const ObservationSeq& obs) {
            if (obs.empty()) {
              const StateSeq initial{structure.s0};
              return guarded("f_i", [&] { return structure.f_i(initial); });
            }
            return run(structure, obs, gap_policy).inferences.back().i;
          }};
}

bool replay_matches(const LaStructure& structure, const Trace& trace) {
  if (trace.states.empty() || trace.states.size() != trace.experiences.size() + 1) return false;
  if (trace.states.front() != structure.s0) return false;
  for (std::size_t k = 0; k < trace.experiences.size(); ++k) {
    if (structure.f_s(trace.states[k], trace.experiences[k].e) != trace.states[k + 1]) {
      return false;
    }
  }
  return true;
}

std::string_view to_string(GapPolicy policy) {
  return policy == GapPolicy::TickPerMissingIndex ? "tick_per_missing_index" : "no_ticks";
}

GapPolicy gap_policy_from_string(std::string_view name) {
  if (name == "tick_per_missing_index") return GapPolicy::TickPerMissingIndex;
  if (name == "no_ticks") return GapPolicy::NoTicks;
  throw LaError(ErrorKind::SchemaError, "unknown gap policy '" + std::string(name) + "'");
}

}  // namespace lak
