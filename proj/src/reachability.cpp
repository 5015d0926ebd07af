#include "lak/reachability.hpp"

#include <algorithm>
#include <map>

#include "lak/errors.hpp"

namespace lak {
namespace {

using Layer = std::vector<char>;  // membership bitmap over state indices

std::map<State, std::size_t> index_states(const FiniteSpec& spec) {
  std::map<State, std::size_t> index;
  for (std::size_t i = 0; i < spec.states.size(); ++i) index.emplace(spec.states[i], i);
  return index;
}

Layer image(const TransitionTable& table, const Layer& from) {
  Layer to(from.size(), 0);
  for (std::size_t s = 0; s < from.size(); ++s) {
    if (!from[s]) continue;
    for (std::size_t target : table.next[s]) to[target] = 1;
  }
  return to;
}

std::set<State> to_set(const FiniteSpec& spec, const Layer& layer) {
  std::set<State> out;
  for (std::size_t s = 0; s < layer.size(); ++s) {
    if (layer[s]) out.insert(spec.states[s]);
  }
  return out;
}

}  // namespace

bool ReachableSet::is_monotone() const {
  for (std::size_t k = 0; k + 1 < per_step.size(); ++k) {
    if (!std::includes(per_step[k + 1].begin(), per_step[k + 1].end(), per_step[k].begin(),
                       per_step[k].end())) {
      return false;
    }
  }
  return true;
}

TransitionTable tabulate(const FiniteSpec& spec) {
  const auto index = index_states(spec);
  auto lookup = [&](const State& s) -> std::size_t {
    auto it = index.find(s);
    return it == index.end() ? spec.states.size() : it->second;
  };

  TransitionTable table;
  table.s0 = lookup(spec.s0);
  if (table.s0 == spec.states.size()) {
    throw LaError(ErrorKind::UnknownState, "s0 " + describe(spec.s0) + " is not enumerated");
  }
  const std::size_t n_exp = spec.experiences.size();
  table.next.assign(spec.states.size(), std::vector<std::size_t>(n_exp + 1));
  for (std::size_t s = 0; s < spec.states.size(); ++s) {
    for (std::size_t e = 0; e <= n_exp; ++e) {
      const Experience& exp = e < n_exp ? spec.experiences[e] : Experience::none();
      const State target = spec.transition(spec.states[s], exp);
      const std::size_t j = lookup(target);
      if (j == spec.states.size()) {
        throw LaError(ErrorKind::NonClosedTransition,
                      "f(" + describe(spec.states[s]) + ", " + describe(exp) + ") = " +
                          describe(target) + " is not an enumerated state");
      }
      table.next[s][e] = j;
    }
  }
  return table;
}

ReachableSet reachable_set(const FiniteSpec& spec, TimeIndex horizon) {
  const TransitionTable table = tabulate(spec);
  const std::size_t n = spec.states.size();
  const std::size_t n_exp = spec.experiences.size();

  ReachableSet result;
  result.horizon = horizon;

  // Witness bookkeeping: predecessor and experience of the first discovery.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pred(n, kNone), via(n, kNone);
  Layer discovered(n, 0);
  discovered[table.s0] = 1;

  Layer layer(n, 0);
  layer[table.s0] = 1;
  result.per_step.push_back(to_set(spec, layer));

  // Past the horizon we only look for the fixpoint; a monotone sequence over n
  // states stabilizes within n steps.
  const std::size_t limit = static_cast<std::size_t>(horizon) + n + 1;
  for (std::size_t k = 0; k < limit; ++k) {
    Layer next(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
      if (!layer[s]) continue;
      for (std::size_t e = 0; e <= n_exp; ++e) {
        const std::size_t t = table.next[s][e];
        next[t] = 1;
        if (k < horizon && !discovered[t]) {
          discovered[t] = 1;
          pred[t] = s;
          via[t] = e;
        }
      }
    }
    if (!result.fixpoint_step && next == layer) result.fixpoint_step = k;
    if (k < horizon) result.per_step.push_back(to_set(spec, next));
    layer = std::move(next);
    if (k + 1 >= horizon && result.fixpoint_step) break;
  }

  for (std::size_t s = 0; s < n; ++s) {
    if (!discovered[s]) continue;
    ExperienceWord word;
    for (std::size_t cur = s; pred[cur] != kNone; cur = pred[cur]) {
      word.push_back(via[cur] < n_exp ? std::optional<Experience>(spec.experiences[via[cur]])
                                      : std::nullopt);
    }
    std::reverse(word.begin(), word.end());
    result.witnesses.push_back({spec.states[s], std::move(word)});
  }
  std::sort(result.witnesses.begin(), result.witnesses.end(),
            [](const ReachWitness& a, const ReachWitness& b) { return a.state < b.state; });
  return result;
}

bool is_reachable(const FiniteSpec& spec, const State& s, TimeIndex horizon) {
  if (std::find(spec.states.begin(), spec.states.end(), s) == spec.states.end()) {
    throw LaError(ErrorKind::UnknownState, describe(s) + " is not an enumerated state");
  }
  return reachable_set(spec, horizon).per_step.back().count(s) > 0;
}

std::vector<State> find_unreachable(const FiniteSpec& spec) {
  const TransitionTable table = tabulate(spec);
  const std::size_t n = spec.states.size();

  // Union of all layers; once a layer adds nothing new the union is final.
  Layer seen(n, 0), layer(n, 0);
  seen[table.s0] = layer[table.s0] = 1;
  for (;;) {
    layer = image(table, layer);
    bool grew = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (layer[s] && !seen[s]) seen[s] = 1, grew = true;
    }
    if (!grew) break;
  }

  std::vector<State> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (!seen[s]) out.push_back(spec.states[s]);
  }
  return out;
}

State replay_word(const FiniteSpec& spec, const ExperienceWord& word) {
  State s = spec.s0;
  for (const auto& e : word) s = spec.transition(s, e ? *e : Experience::none());
  return s;
}

FiniteSpec saturating_demo_spec() {
  FiniteSpec spec;
  for (double v : {0.0, 1.0, 2.0, 3.0}) spec.states.push_back(State{v});
  spec.experiences.push_back(Experience{std::string("a")});
  spec.s0 = State{0.0};
  spec.transition = [](const State& s, const Experience& e) {
    if (e.is_empty()) return s;
    return State{std::min(std::get<double>(s.payload) + 1.0, 2.0)};
  };
  spec.description = "saturating counter over {0,1,2,3}";
  return spec;
}

}  // namespace lak
