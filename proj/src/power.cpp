#include "relayopt/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "golden.hpp"
#include "relayopt/rates.hpp"

namespace relayopt {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

PathPowerSolution make_solution(Strategy strategy, const PathGains& g, double S, double R,
                                double ps, double pr) {
  return {ps, pr, path_lagrangian(strategy, g, S, R, ps, pr)};
}

bool df_carries_rate(const PathGains& g) { return g.w > 0 && g.a > 0 && g.b + g.c > 0; }

bool af_carries_rate(const PathGains& g) {
  return g.w > 0 && (g.c > 0 || (g.a > 0 && g.b > 0));
}

// Empty optional means the Lagrangian is unbounded above at these prices.
std::optional<DfBranches> df_branches_impl(const PathGains& g, double S, double R) {
  if (!df_carries_rate(g)) return DfBranches{};
  if (g.a <= g.c) {
    if (S <= 0) return std::nullopt;
    const double ps = pos(g.w / (kAlpha * S) - 1.0 / g.a);
    return DfBranches{make_solution(Strategy::kDF, g, S, R, ps, 0.0), std::nullopt};
  }

  std::optional<PathPowerSolution> p1;
  if (g.b > 0) {
    const double D = g.b * S + (g.a - g.c) * R;
    if (D <= 0) return std::nullopt;
    const double ps = pos(g.w * g.b / (kAlpha * D) - 1.0 / g.a);
    p1 = make_solution(Strategy::kDF, g, S, R, ps, (g.a - g.c) / g.b * ps);
  }

  // c / S < b / R, written without dividing by a possibly zero price.
  bool relay_cheaper;
  if (g.c == 0)
    relay_cheaper = g.b > 0;
  else if (S <= 0)
    relay_cheaper = false;
  else
    relay_cheaper = g.c * R < g.b * S;

  if (relay_cheaper) {
    if (g.c > 0 && S > 0) {
      const double ps = pos(g.w / (kAlpha * S) - 1.0 / g.c);
      return DfBranches{*p1, make_solution(Strategy::kDF, g, S, R, ps, 0.0)};
    }
    return DfBranches{*p1, std::nullopt};
  }

  if (S <= 0) return std::nullopt;
  const PathPowerSolution p2 =
      make_solution(Strategy::kDF, g, S, R, pos(g.w / (kAlpha * S) - 1.0 / g.c), 0.0);
  if (p1 && p1->lagrangian_unit > p2.lagrangian_unit) return DfBranches{*p1, p2};
  return DfBranches{p2, p1};
}

std::optional<PathPowerSolution> af_impl(const PathGains& g, double S, double R) {
  if (!af_carries_rate(g)) return PathPowerSolution{};
  if (S <= 0) return std::nullopt;
  if (g.a > 0 && g.b > 0 && R <= 0) return std::nullopt;

  // The bound is positively homogeneous inside the log, so along a ray
  // (ps, pr) = r (cos t, sin t) it is (1/2)log2(1 + q r) and the radial
  // optimum is water-filling. The peak value is quasi-concave in t.
  auto along = [&](double t, double& r) {
    const double u = std::cos(t);
    const double v = std::sin(t);
    const double den = g.a * u + g.b * v;
    const double q = (den > 0 ? g.a * g.b * u * v / den : 0.0) + g.c * u;
    r = 0.0;
    if (q <= 0) return 0.0;
    const double k = S * u + R * v;
    r = pos(g.w / (kAlpha * k) - 1.0 / q);
    return g.w * detail::half_log2_1p(r * q) - r * k;
  };
  double r = 0.0;
  auto value = [&](double t) { return along(t, r); };
  const auto [t, v] =
      detail::scan_then_golden_max(value, 0.0, std::numbers::pi / 2, 64, 1e-13);
  if (!(v > 0)) return PathPowerSolution{};
  along(t, r);
  return make_solution(Strategy::kAFUpper, g, S, R, r * std::cos(t), r * std::sin(t));
}

[[noreturn]] void throw_unbounded(const PathGains& g, double S, double R) {
  throw UnboundedSubproblem("per-path Lagrangian unbounded: w=" + std::to_string(g.w) +
                            " a=" + std::to_string(g.a) + " b=" + std::to_string(g.b) +
                            " c=" + std::to_string(g.c) + " source price=" +
                            std::to_string(S) + " relay price=" + std::to_string(R));
}

std::optional<PathPowerSolution> path_power_impl(Strategy strategy, const PathGains& g,
                                                 double S, double R) {
  if (strategy == Strategy::kDF) {
    auto br = df_branches_impl(g, S, R);
    if (!br) return std::nullopt;
    return br->chosen;
  }
  return af_impl(g, S, R);
}

}  // namespace

PathGains path_gains(const Scenario& s, int m, int n, int k) {
  return {s.w(k), s.a(m), s.b(n, k), s.c(m, k)};
}

double path_lagrangian(Strategy strategy, const PathGains& g, double S, double R, double ps,
                       double pr) {
  return g.w * optimized_path_rate(strategy, g.a, g.b, g.c, ps, pr) - S * ps - R * pr;
}

DfBranches df_path_branches(const PathGains& g, double S, double R) {
  auto br = df_branches_impl(g, S, R);
  if (!br) throw_unbounded(g, S, R);
  return *br;
}

PathPowerSolution df_path_power(const PathGains& g, double S, double R) {
  return df_path_branches(g, S, R).chosen;
}

PathPowerSolution df_path_power(const PathGains& g, const Multipliers& lambda) {
  return df_path_power(g, source_price(lambda), relay_price(lambda));
}

PathPowerSolution af_path_power(const PathGains& g, double S, double R) {
  auto sol = af_impl(g, S, R);
  if (!sol) throw_unbounded(g, S, R);
  return *sol;
}

PathPowerSolution af_path_power(const PathGains& g, const Multipliers& lambda) {
  return af_path_power(g, source_price(lambda), relay_price(lambda));
}

PathPowerSolution path_power(Strategy strategy, const PathGains& g, double S, double R) {
  auto sol = path_power_impl(strategy, g, S, R);
  if (!sol) throw_unbounded(g, S, R);
  return *sol;
}

double path_profit(const PathGains& g, const Multipliers& lambda, Strategy strategy) {
  return std::max(0.0,
                  path_power(strategy, g, source_price(lambda), relay_price(lambda))
                      .lagrangian_unit);
}

FixedPowerResult allocate_power(const Scenario& s, const Assignment& asg) {
  const int N = asg.size();
  const Strategy strategy = s.strategy;
  std::vector<PathGains> gains(N);
  double weight_sum = 0.0;
  for (int m = 0; m < N; ++m) {
    gains[m] = path_gains(s, m, asg.pairing[m], asg.user_of_pair[m]);
    const bool live =
        strategy == Strategy::kDF ? df_carries_rate(gains[m]) : af_carries_rate(gains[m]);
    if (live) weight_sum += gains[m].w;
  }

  FixedPowerResult out;
  out.powers = PowerAllocation::zeros(N);
  if (weight_sum <= 0) return out;

  // Dual restricted to this assignment, as a function of the effective prices.
  // The total-power multiplier is folded in: lt = min(S, R) when the total
  // limit is tighter than the sum of the individual ones, else 0.
  const double excess = std::max(0.0, s.p_s + s.p_r - s.p_t);
  auto dual = [&](double S, double R) {
    double v = S * s.p_s + R * s.p_r - std::min(S, R) * excess;
    for (const auto& g : gains) {
      auto sol = path_power_impl(strategy, g, S, R);
      if (!sol) return std::numeric_limits<double>::infinity();
      v += sol->lagrangian_unit;
    }
    return v;
  };
  const double min_limit = std::min({s.p_s, s.p_r, s.p_t});
  const double hi = 4.0 * weight_sum / (kAlpha * min_limit);
  const double xtol = 1e-11 * hi;
  auto best_R = [&](double S) {
    return detail::golden_min([&](double R) { return dual(S, R); }, 0.0, hi, xtol);
  };
  const double S = detail::golden_min([&](double S) { return best_R(S).second; }, 0.0, hi,
                                      xtol)
                       .first;
  const double R = best_R(S).first;
  out.source_price = S;
  out.relay_price = R;

  // Per-path maximizers; DF paths on the branch switch keep both candidates.
  std::vector<PathPowerSolution> base(N), other(N);
  std::vector<int> mixed;
  for (int m = 0; m < N; ++m) {
    if (strategy == Strategy::kDF) {
      const DfBranches br = df_path_branches(gains[m], S, R);
      base[m] = br.chosen;
      if (br.alternative &&
          std::abs(br.chosen.lagrangian_unit - br.alternative->lagrangian_unit) <=
              1e-6 * gains[m].w) {
        other[m] = *br.alternative;
        mixed.push_back(m);
      }
    } else {
      base[m] = path_power(strategy, gains[m], S, R);
    }
  }

  std::vector<double> mix(N, 1.0);
  auto build = [&]() {
    PowerAllocation p = PowerAllocation::zeros(N);
    for (int m = 0; m < N; ++m) {
      const double t = mix[m];
      p.ps(m) = t * base[m].ps_unit + (1 - t) * other[m].ps_unit;
      p.pr(m) = t * base[m].pr_unit + (1 - t) * other[m].pr_unit;
    }
    const double scale = feasibility_scale(s, p);
    p.ps *= scale;
    p.pr *= scale;
    return p;
  };
  auto objective = [&]() { return optimized_weighted_sum_rate(s, asg, build()); };

  for (int sweep = 0; sweep < 3 && !mixed.empty(); ++sweep) {
    for (int m : mixed) {
      auto f = [&](double t) {
        mix[m] = t;
        return objective();
      };
      mix[m] = detail::scan_then_golden_max(f, 0.0, 1.0, 32, 1e-10).first;
    }
  }

  out.powers = build();
  out.value = optimized_weighted_sum_rate(s, asg, out.powers);
  return out;
}

}  // namespace relayopt
