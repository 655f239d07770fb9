#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "relayopt/dual.hpp"
#include "relayopt/model.hpp"
#include "relayopt/sim.hpp"

namespace relayopt {

// Malformed or schema-violating input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Scenario schema: n_channels, n_users, a[N], b[N][K], c[N][K], w[K], p_s,
/// p_r, p_t, and optionally strategy ("DF", "AF", "AF_UPPER"; default DF).
/// Unknown keys are rejected. The scenario is not validated beyond shape.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);

// Reads and parses a scenario file; SchemaError on any failure.
Scenario load_scenario(const std::string& path);

/// {assignment: {pairing, users}, powers: {ps, pr}, primal, dual, gap,
/// iterations, region, ...}. Indices are zero-based; non-finite numbers are
/// written as null.
nlohmann::json solve_result_to_json(const SolveResult& result, const std::string& scheme);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

// Result table with a header row; doubles printed with %.12g.
std::string results_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_csv(const std::string& text);

std::string trace_to_csv(const std::vector<TraceRecord>& trace);

}  // namespace relayopt
