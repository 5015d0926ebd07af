#include "lak/instances/bkt.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "lak/errors.hpp"

namespace lak::bkt {
namespace {

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

bool is_correct(const Observation& o) {
  if (o.is_symbol()) {
    if (o.as_symbol() == kCorrect) return true;
    if (o.as_symbol() == kIncorrect) return false;
  }
  throw LaError(ErrorKind::MalformedObservation,
                "expected correct/incorrect, got " + describe(o));
}

std::vector<std::vector<char>> to_responses(const std::vector<ObservationSeq>& traces) {
  std::vector<std::vector<char>> out;
  out.reserve(traces.size());
  for (const auto& trace : traces) {
    std::vector<char> r;
    r.reserve(trace.size());
    for (const auto& item : trace) r.push_back(is_correct(item.o) ? 1 : 0);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Likelihood of one response sequence by the unnormalized forward pass: `a` and
// `b` are the joint probabilities of the responses so far with and without
// mastery. They are renormalized every 16 steps to stay clear of underflow.
double trace_log_likelihood(const std::vector<char>& responses, double l0, double t, double g,
                            double s) {
  double a = l0;
  double b = 1.0 - l0;
  double acc = 0.0;
  std::size_t pending = 0;
  for (char correct : responses) {
    if (correct) {
      a *= 1.0 - s;
      b *= g;
    } else {
      a *= s;
      b *= 1.0 - g;
    }
    a += b * t;
    b *= 1.0 - t;
    if (++pending == 16) {
      const double z = a + b;
      if (!(z > 0.0)) return kNegInf;
      acc += std::log(z);
      a /= z;
      b /= z;
      pending = 0;
    }
  }
  return acc + std::log(a + b);
}

// Distinct response sequences with their multiplicities, in first-seen order.
std::vector<std::pair<std::vector<char>, double>> tally(std::vector<std::vector<char>> responses) {
  std::map<std::vector<char>, std::size_t> index;
  std::vector<std::pair<std::vector<char>, double>> out;
  for (auto& r : responses) {
    auto [it, fresh] = index.emplace(r, out.size());
    if (fresh) {
      out.emplace_back(std::move(r), 1.0);
    } else {
      out[it->second].second += 1.0;
    }
  }
  return out;
}

}  // namespace

void validate(const BktParams& params) {
  if (!in_unit(params.p_init) || !in_unit(params.p_transit) || !in_unit(params.p_guess) ||
      !in_unit(params.p_slip) || !in_unit(params.p_forget)) {
    throw LaError(ErrorKind::InvalidParams, "BKT probabilities must lie in [0, 1]");
  }
  if (!(params.p_guess < 1.0 - params.p_slip)) {
    throw LaError(ErrorKind::InvalidParams,
                  "p_guess must be below 1 - p_slip, otherwise correct answers carry no "
                  "evidence of mastery");
  }
}

std::string mastery_label(double p) { return p >= 0.5 ? kLearned : kUnlearned; }

State make_state(double p) { return make_state(p, 1.0 - p); }

State make_state(double p, double not_p) {
  return State{LabeledNumber{mastery_label(p), p, not_p}};
}

double mastery_prob(const State& s) { return std::get<LabeledNumber>(s.payload).value; }

double mastery_complement(const State& s) {
  const auto& n = std::get<LabeledNumber>(s.payload);
  return n.complement ? *n.complement : 1.0 - n.value;
}

double p_correct(const BktParams& params, double p) {
  return p * (1.0 - params.p_slip) + (1.0 - p) * params.p_guess;
}

Belief update(const BktParams& params, Belief prior, bool correct) {
  // Both joints are formed directly so neither side is recovered by subtraction.
  const double mastered = prior.p * (correct ? 1.0 - params.p_slip : params.p_slip);
  const double unmastered = prior.not_p * (correct ? params.p_guess : 1.0 - params.p_guess);
  const double evidence = mastered + unmastered;
  if (!(evidence > 0.0)) {
    throw LaError(ErrorKind::ZeroLikelihood,
                  std::string("response '") + (correct ? kCorrect : kIncorrect) +
                      "' has probability 0 at mastery " + std::to_string(prior.p));
  }
  const double post = mastered / evidence;
  const double post_not = unmastered / evidence;
  return {post + post_not * params.p_transit, post_not * (1.0 - params.p_transit)};
}

double update(const BktParams& params, double prior, bool correct) {
  return update(params, Belief{prior, 1.0 - prior}, correct).p;
}

LaStructure bkt_structure(const BktParams& params) {
  validate(params);
  LaStructure s;
  s.name = "bkt";
  s.obs_space = {"{correct, incorrect}", [](const Observation& o) {
                   return o.is_symbol() &&
                          (o.as_symbol() == kCorrect || o.as_symbol() == kIncorrect);
                 }};
  s.exp_space = {"observation sequences", [](const Experience& e) {
                   return std::holds_alternative<ObservationSeq>(e.payload);
                 }};
  s.state_space = {"{learned, unlearned} x [0, 1]", [](const State& st) {
                     const auto* v = std::get_if<LabeledNumber>(&st.payload);
                     return v != nullptr && in_unit(v->value) &&
                            v->label == mastery_label(v->value);
                   }};
  s.inf_space = {"[0, 1]", [](const Inference& i) { return i.is_number() && in_unit(i.as_number()); }};
  s.s0 = make_state(params.p_init);
  s.f_e = [](const ObservationSeq& obs) { return Experience{obs}; };
  s.f_s = [params](const State& prev, const Experience& e) {
    const double p = mastery_prob(prev);
    const double not_p = mastery_complement(prev);
    if (e.is_empty()) {
      if (params.p_forget == 0.0) return prev;
      return make_state(p * (1.0 - params.p_forget), not_p + p * params.p_forget);
    }
    const auto& seq = std::get<ObservationSeq>(e.payload);
    const Belief b = update(params, Belief{p, not_p}, is_correct(seq.back().o));
    return make_state(b.p, b.not_p);
  };
  s.f_i = [](std::span<const State> states) { return Inference::number(mastery_prob(states.back())); };
  return s;
}

double log_likelihood(const BktParams& params, const std::vector<ObservationSeq>& traces) {
  double total = 0.0;
  for (const auto& responses : to_responses(traces)) {
    total += trace_log_likelihood(responses, params.p_init, params.p_transit, params.p_guess,
                                  params.p_slip);
  }
  return total;
}

std::size_t count_observations(const std::vector<ObservationSeq>& traces) {
  std::size_t n = 0;
  for (const auto& t : traces) n += t.size();
  return n;
}

std::vector<double> init_axis(std::size_t resolution) { return linspace(0.0, 1.0, resolution); }

std::vector<double> guess_slip_axis(std::size_t resolution) {
  return linspace(0.0, 0.5, resolution);
}

BktParams bkt_fit(const std::vector<ObservationSeq>& traces, std::size_t resolution) {
  if (traces.empty()) throw LaError(ErrorKind::EmptyCorpus, "bkt_fit needs at least one trace");
  if (resolution == 0) throw LaError(ErrorKind::InvalidParams, "grid resolution must be >= 1");
  const auto responses = tally(to_responses(traces));
  const auto l_axis = init_axis(resolution);
  const auto gs_axis = guess_slip_axis(resolution);

  BktParams best{l_axis[0], l_axis[0], gs_axis[0], gs_axis[0], 0.0};
  double best_ll = kNegInf;
  bool have_best = false;
  for (double l0 : l_axis) {
    for (double t : l_axis) {
      for (double g : gs_axis) {
        for (double s : gs_axis) {
          if (!(g < 1.0 - s)) continue;
          double ll = 0.0;
          for (const auto& [r, count] : responses) {
            ll += count * trace_log_likelihood(r, l0, t, g, s);
            if (ll == kNegInf) break;
          }
          // Strict comparison keeps the lexicographically smallest tuple on ties.
          if (!have_best || ll > best_ll) {
            best = {l0, t, g, s, 0.0};
            best_ll = ll;
            have_best = true;
          }
        }
      }
    }
  }
  return best;
}

FiniteSpec finite_approximation(const BktParams& params, std::size_t grid_points) {
  validate(params);
  if (grid_points < 2) throw LaError(ErrorKind::InvalidParams, "need at least 2 grid points");
  const double steps = static_cast<double>(grid_points - 1);
  auto snap = [steps](double p) { return make_state(std::round(p * steps) / steps); };

  FiniteSpec spec;
  spec.approximate = true;
  spec.description = "BKT on a " + std::to_string(grid_points) + "-point probability grid";
  for (std::size_t i = 0; i < grid_points; ++i) {
    spec.states.push_back(make_state(static_cast<double>(i) / steps));
  }
  spec.experiences.push_back(Experience{ObservationSeq::from_symbols({kCorrect})});
  spec.experiences.push_back(Experience{ObservationSeq::from_symbols({kIncorrect})});
  spec.s0 = snap(params.p_init);
  spec.transition = [params, snap](const State& st, const Experience& e) {
    const double p = mastery_prob(st);
    if (e.is_empty()) return snap(p * (1.0 - params.p_forget));
    const auto& seq = std::get<ObservationSeq>(e.payload);
    try {
      return snap(update(params, p, is_correct(seq.back().o)));
    } catch (const LaError& err) {
      // Impossible evidence leaves the state where it was.
      if (err.kind() != ErrorKind::ZeroLikelihood) throw;
      return st;
    }
  };
  return spec;
}

}  // namespace lak::bkt
