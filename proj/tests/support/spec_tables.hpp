#pragma once

// Finite specs built from explicit successor tables: states 0..n-1 as numbers,
// experiences "e0".."e{m-1}".

#include <set>
#include <string>
#include <vector>

#include "lak/random.hpp"
#include "lak/reachability.hpp"
#include "oracles/bfs_reach.hpp"

namespace support {

inline lak::FiniteSpec spec_from_table(const oracle::Table& next, const std::vector<int>& eps,
                                       int s0) {
  using lak::State;
  lak::FiniteSpec spec;
  for (std::size_t s = 0; s < next.size(); ++s) spec.states.push_back(State{double(s)});
  for (std::size_t e = 0; e < next[0].size(); ++e) {
    spec.experiences.push_back(lak::Experience{"e" + std::to_string(e)});
  }
  spec.s0 = State{double(s0)};
  spec.transition = [next, eps](const State& s, const lak::Experience& e) {
    const int i = static_cast<int>(std::get<double>(s.payload));
    if (e.is_empty()) return State{double(eps[i])};
    const int letter = std::stoi(std::get<std::string>(e.payload).substr(1));
    return State{double(next[i][letter])};
  };
  return spec;
}

inline std::set<lak::State> as_states(const std::set<int>& xs) {
  std::set<lak::State> out;
  for (int x : xs) out.insert(lak::State{double(x)});
  return out;
}

inline oracle::Table random_table(lak::SplitMix64& rng, int n, int m) {
  oracle::Table next(n, std::vector<int>(m));
  for (auto& row : next) {
    for (auto& t : row) t = static_cast<int>(rng.below(n));
  }
  return next;
}

}  // namespace support
