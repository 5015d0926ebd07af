#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lak/reachability.hpp"
#include "lak/structure.hpp"

namespace lak::bkt {

inline constexpr const char* kCorrect = "correct";
inline constexpr const char* kIncorrect = "incorrect";
inline constexpr const char* kLearned = "learned";
inline constexpr const char* kUnlearned = "unlearned";

struct BktParams {
  double p_init = 0.5;     ///< prior mastery L0
  double p_transit = 0.3;  ///< unlearned -> learned after each opportunity
  double p_guess = 0.2;    ///< correct answer without mastery
  double p_slip = 0.1;     ///< incorrect answer despite mastery
  double p_forget = 0.0;   ///< multiplicative decay per empty-experience tick

  auto operator<=>(const BktParams&) const = default;
};

/// Throws InvalidParams unless all probabilities lie in [0, 1] and p_guess < 1 - p_slip.
void validate(const BktParams& params);

/// Label convention: learned iff p >= 0.5.
std::string mastery_label(double p);
/// (label, p) with 1 - p carried alongside.
State make_state(double p);
/// State from a mastery probability and its separately computed complement.
State make_state(double p, double not_p);
double mastery_prob(const State& s);
/// 1 - p at full precision, which matters once p is close to 1.
double mastery_complement(const State& s);

/// Mastery probability and its complement, each kept to full relative precision.
struct Belief {
  double p = 0.0;
  double not_p = 1.0;
};

/// Posterior after one response followed by the learning step. Throws ZeroLikelihood
/// when the response has probability zero under `prior`.
Belief update(const BktParams& params, Belief prior, bool correct);
double update(const BktParams& params, double prior, bool correct);

/// Probability of a correct response given mastery probability `p`.
double p_correct(const BktParams& params, double p);

/// Observations {correct, incorrect}; experiences are the observation prefixes;
/// states are (label, p); the inference is p of the last state.
LaStructure bkt_structure(const BktParams& params);

/// Total log-likelihood of the traces (responses scored before each update).
/// Returns -infinity when some response has probability zero.
double log_likelihood(const BktParams& params, const std::vector<ObservationSeq>& traces);

/// Number of responses across the traces.
std::size_t count_observations(const std::vector<ObservationSeq>& traces);

/// Axis values used by the grid search for `resolution` points per axis:
/// p_init and p_transit span [0, 1], p_guess and p_slip span [0, 0.5].
std::vector<double> init_axis(std::size_t resolution);
std::vector<double> guess_slip_axis(std::size_t resolution);

/// Grid-search maximum-likelihood fit over (p_init, p_transit, p_guess, p_slip) with
/// p_forget fixed at 0. Ties go to the lexicographically smallest tuple. Throws
/// EmptyCorpus when there are no traces and MalformedObservation on non-binary symbols.
BktParams bkt_fit(const std::vector<ObservationSeq>& traces, std::size_t resolution = 21);

/// Finite approximation with p rounded to a uniform grid of `grid_points` values in
/// [0, 1]; experiences are the two single-response sequences.
FiniteSpec finite_approximation(const BktParams& params, std::size_t grid_points = 1001);

}  // namespace lak::bkt
