#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "relayopt/model.hpp"

namespace relayopt::test {

// One channel, one user.
inline Scenario single_path(double a, double b, double c, double p_s, double p_r, double p_t,
                            Strategy strategy = Strategy::kDF) {
  Scenario s;
  s.n_channels = 1;
  s.n_users = 1;
  s.a = VecX::Constant(1, a);
  s.b = MatX::Constant(1, 1, b);
  s.c = MatX::Constant(1, 1, c);
  s.w = VecX::Ones(1);
  s.p_s = p_s;
  s.p_r = p_r;
  s.p_t = p_t;
  s.strategy = strategy;
  return s;
}

inline Scenario random_gains(int N, int K, std::uint64_t seed, Strategy strategy = Strategy::kDF) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gain(1.0);
  std::uniform_real_distribution<double> limit(0.5, 4.0);
  Scenario s;
  s.n_channels = N;
  s.n_users = K;
  s.a = VecX::NullaryExpr(N, [&] { return gain(rng); });
  s.b = MatX::NullaryExpr(N, K, [&] { return gain(rng); });
  s.c = MatX::NullaryExpr(N, K, [&] { return gain(rng); });
  s.w = VecX::NullaryExpr(K, [&] { return 0.1 + gain(rng); });
  s.w /= s.w.sum();
  s.p_s = limit(rng);
  s.p_r = limit(rng);
  s.p_t = limit(rng);
  s.strategy = strategy;
  return s;
}

// All permutations of 0..n-1 in lexicographic order.
inline std::vector<std::vector<int>> permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace relayopt::test
