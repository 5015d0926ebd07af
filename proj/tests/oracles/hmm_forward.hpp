#pragma once

// Two-state hidden Markov model filter written from the forward recursion,
// independent of the library's closed-form knowledge-tracing update.
// Hidden states: index 0 = not mastered, 1 = mastered.

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace oracle {

struct HmmParams {
  double l0, t, g, s, f = 0.0;
};

using Belief = std::array<double, 2>;

inline Belief condition(const Belief& prior, const HmmParams& p, bool correct, double* evidence) {
  const std::array<double, 2> emit = correct ? std::array<double, 2>{p.g, 1.0 - p.s}
                                             : std::array<double, 2>{1.0 - p.g, p.s};
  Belief joint{prior[0] * emit[0], prior[1] * emit[1]};
  const double z = joint[0] + joint[1];
  if (evidence) *evidence = z;
  return {joint[0] / z, joint[1] / z};
}

inline Belief propagate(const Belief& b, const double (&a)[2][2]) {
  return {b[0] * a[0][0] + b[1] * a[1][0], b[0] * a[0][1] + b[1] * a[1][1]};
}

inline Belief learn(const Belief& b, const HmmParams& p) {
  const double a[2][2] = {{1.0 - p.t, p.t}, {0.0, 1.0}};
  return propagate(b, a);
}

inline Belief forget(const Belief& b, const HmmParams& p) {
  const double a[2][2] = {{1.0, 0.0}, {p.f, 1.0 - p.f}};
  return propagate(b, a);
}

/// P(mastered) after each response, following emission conditioning and the learning transition.
inline std::vector<double> mastery_trajectory(const HmmParams& p, const std::vector<bool>& responses) {
  Belief b{1.0 - p.l0, p.l0};
  std::vector<double> out;
  for (bool r : responses) {
    b = learn(condition(b, p, r, nullptr), p);
    out.push_back(b[1]);
  }
  return out;
}

/// log P(responses) by the forward algorithm.
inline double log_likelihood(const HmmParams& p, const std::vector<bool>& responses) {
  Belief b{1.0 - p.l0, p.l0};
  double ll = 0.0;
  for (bool r : responses) {
    double z = 0.0;
    b = learn(condition(b, p, r, &z), p);
    ll += std::log(z);
  }
  return ll;
}

}  // namespace oracle
