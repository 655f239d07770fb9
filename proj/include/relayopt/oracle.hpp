#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "relayopt/model.hpp"

namespace relayopt {

inline constexpr std::uint64_t kDefaultOracleBudget = 1'000'000;

// N! * K^N, saturating at UINT64_MAX.
std::uint64_t assignment_count(int n_channels, int n_users);

/// Visits every (pairing, user map) exactly once: pairings in lexicographic
/// order, and for each pairing the user maps counting in base K with the
/// last pair varying fastest. Throws BudgetExceeded before visiting anything
/// when the count exceeds `budget`.
void for_each_assignment(int n_channels, int n_users, std::uint64_t budget,
                         const std::function<void(const Assignment&)>& visit);

std::vector<Assignment> enumerate_assignments(int n_channels, int n_users,
                                              std::uint64_t budget = kDefaultOracleBudget);

struct OracleAllocation {
  PowerAllocation powers;
  double value = 0.0;  // weighted sum-rate under the scenario's exact rate
  bool converged = true;
};

/// Maximizes the weighted sum-rate for a frozen assignment with a primal
/// log-barrier method: epigraph variables for the per-path rates, Newton
/// centering, barrier weight raised tenfold until the duality-gap bound is
/// below 1e-10. AF strategies optimize the concave bound.
OracleAllocation fixed_assignment_power_opt(const Scenario& scenario,
                                            const Assignment& assignment);

/// Best assignment by exhaustion; ties keep the first in enumeration order.
SolveResult brute_force_solve(const Scenario& scenario,
                              std::uint64_t budget = kDefaultOracleBudget);

}  // namespace relayopt
