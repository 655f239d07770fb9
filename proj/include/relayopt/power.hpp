#pragma once

#include <optional>

#include "relayopt/model.hpp"

namespace relayopt {

// Weight and gains of one path (m, n, k).
struct PathGains {
  double w = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

PathGains path_gains(const Scenario& scenario, int m, int n, int k);

/// Maximizer of the per-path Lagrangian
///   w * R(ps, pr) - (ls + lt) * ps - (lr + lt) * pr
/// for a unit assignment weight. Powers for a fractional weight phi are
/// phi times these; the value per unit phi does not depend on phi.
struct PathPowerSolution {
  double ps_unit = 0.0;
  double pr_unit = 0.0;
  double lagrangian_unit = 0.0;
};

// Per-path Lagrangian under the strategy's optimized rate.
double path_lagrangian(Strategy strategy, const PathGains& gains, double source_price,
                       double relay_price, double ps, double pr);

/// Closed-form DF maximizer.
///
/// a <= c: the decode constraint always binds, water-fill on a with no relay
/// power. a > c: either the balanced solution pr = ((a - c) / b) ps, or the
/// direct-link-only solution, whichever has the larger Lagrangian; the
/// balanced one is taken without comparison when relaying is cheaper per unit
/// gain (c / (ls + lt) < b / (lr + lt)). Equal values resolve to the
/// direct-link-only solution.
///
/// Throws UnboundedSubproblem when the path can carry rate but the relevant
/// price is zero.
PathPowerSolution df_path_power(const PathGains& gains, const Multipliers& lambda);
PathPowerSolution df_path_power(const PathGains& gains, double source_price, double relay_price);

// Both DF branch solutions when the balanced and direct-link-only candidates
// compete; `alternative` is the one not returned by df_path_power.
struct DfBranches {
  PathPowerSolution chosen;
  std::optional<PathPowerSolution> alternative;
};
DfBranches df_path_branches(const PathGains& gains, double source_price, double relay_price);

/// Numerical maximizer for the concave AF upper bound. Requires positive
/// source and relay prices whenever the corresponding power can raise the rate.
PathPowerSolution af_path_power(const PathGains& gains, const Multipliers& lambda);
PathPowerSolution af_path_power(const PathGains& gains, double source_price, double relay_price);

// Dispatch on strategy; AF and AF_UPPER both optimize the bound.
PathPowerSolution path_power(Strategy strategy, const PathGains& gains, double source_price,
                             double relay_price);

// A_mnk: the per-unit Lagrangian value at the optimal powers. Always >= 0.
double path_profit(const PathGains& gains, const Multipliers& lambda, Strategy strategy);

struct FixedPowerResult {
  PowerAllocation powers;
  double value = 0.0;  // optimized objective (AF bound for AF strategies)
  double source_price = 0.0;
  double relay_price = 0.0;
};

/// Optimal power allocation for a frozen assignment.
///
/// Minimizes the assignment-restricted dual over the effective prices
/// (ls + lt, lr + lt) by nested golden-section search, then builds a primal
/// point from the per-path maximizers. Where a DF path sits on the switch
/// between its two branch solutions, the mix of the two that maximizes the
/// objective while respecting the limits is used. Any residual excess over
/// the limits is removed by uniform scaling.
FixedPowerResult allocate_power(const Scenario& scenario, const Assignment& assignment);

}  // namespace relayopt
