#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace relayopt::detail {

// Golden-section maximization of a unimodal f on [lo, hi]. Returns the best
// probe (x, f(x)); the endpoints are never evaluated.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double xtol,
                                     int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

template <typename F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, double xtol,
                                     int max_iter = 200) {
  auto [x, v] = golden_max([&](double t) { return -f(t); }, lo, hi, xtol, max_iter);
  return {x, -v};
}

// Scan n + 1 equispaced points on [lo, hi] and refine around the best one.
// Suited to quasi-concave f that may be flat away from its peak.
template <typename F>
std::pair<double, double> scan_then_golden_max(F&& f, double lo, double hi, int n,
                                               double xtol) {
  const double h = (hi - lo) / n;
  int best = 0;
  double best_v = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = f(lo + i * h);
    if (v > best_v) {
      best = i;
      best_v = v;
    }
  }
  const double a = lo + std::max(best - 1, 0) * h;
  const double b = lo + std::min(best + 1, n) * h;
  auto [x, v] = golden_max(f, a, b, xtol);
  if (v > best_v) return {x, v};
  return {lo + best * h, best_v};
}

}  // namespace relayopt::detail
