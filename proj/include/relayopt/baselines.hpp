#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "relayopt/dual.hpp"
#include "relayopt/model.hpp"

namespace relayopt {

// Per-channel powers used by the uniform-power schemes: source
// min(p_s, p_t p_s / (p_s + p_r)) / N, relay likewise.
PowerAllocation uniform_powers(const Scenario& scenario);

// Joint optimization with the identity channel pairing.
SolveResult no_pairing_solve(const Scenario& scenario, const DcdmOptions& options = {});

// Uniform powers, jointly optimal pairing and user selection for them.
SolveResult no_pa_solve(const Scenario& scenario);

/// Three stages: each second-hop channel goes to its strongest user, first-hop
/// channels sorted by gain are paired with second-hop channels sorted by the
/// gain of their user, then optimal power allocation for that assignment.
SolveResult separate_opt_solve(const Scenario& scenario);

// Identity pairing, strongest second-hop user per channel, uniform powers.
SolveResult max_gain_solve(const Scenario& scenario);

inline constexpr std::string_view kSchemeIds[] = {"joint", "no_pairing", "no_pa", "separate",
                                                  "max_gain"};

bool is_scheme(std::string_view id);

// Dispatch by scheme identifier; `options` applies to the dual-based schemes.
SolveResult solve_scheme(std::string_view id, const Scenario& scenario,
                         const DcdmOptions& options = {});

}  // namespace relayopt
