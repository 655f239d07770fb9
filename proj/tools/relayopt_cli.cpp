// relayopt: solve, verify and experiment front end.
//
// Exit codes: 0 ok, 1 schema or input error, 2 solver did not converge,
// 3 oracle budget exceeded, 4 verification mismatch.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "relayopt/baselines.hpp"
#include "relayopt/dual.hpp"
#include "relayopt/io.hpp"
#include "relayopt/oracle.hpp"
#include "relayopt/sim.hpp"

namespace {

using namespace relayopt;
using nlohmann::json;

enum Exit { kOk = 0, kSchema = 1, kNoConvergence = 2, kBudget = 3, kMismatch = 4 };

std::uint64_t oracle_budget() {
  if (const char* env = std::getenv("RELAYOPT_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    std::cerr << "ignoring malformed RELAYOPT_BUDGET=" << env << "\n";
  }
  return kDefaultOracleBudget;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return static_cast<bool>(out);
}

struct SolveArgs {
  std::string scenario;
  std::string scheme = "joint";
  std::string trace;
  std::string method = "ellipsoid";
};

DcdmOptions dcdm_options(double tolerance, const std::string& method, bool trace) {
  DcdmOptions o;
  o.tolerance = tolerance;
  o.method = method == "subgradient" ? DualMethod::kSubgradient : DualMethod::kEllipsoid;
  if (o.method == DualMethod::kSubgradient) o.max_iter = 20000;
  o.record_trace = trace;
  return o;
}

int cmd_solve(const SolveArgs& args, double tolerance) {
  Scenario s;
  try {
    s = load_scenario(args.scenario);
    require_valid(s);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchema;
  }
  if (!is_scheme(args.scheme)) {
    std::cerr << "error: unknown scheme " << args.scheme << "\n";
    return kSchema;
  }
  const DcdmOptions opt = dcdm_options(tolerance, args.method, !args.trace.empty());
  SolveResult r;
  try {
    if (args.scheme == "joint" || args.scheme == "no_pairing") {
      DcdmOptions o = opt;
      if (args.scheme == "no_pairing") o.policy = PairingPolicy::kIdentity;
      const DcdmResult traced = dcdm_solve_traced(s, o);
      r = traced.solution;
      if (!args.trace.empty() && !write_file(args.trace, trace_to_csv(traced.trace))) {
        std::cerr << "error: cannot write " << args.trace << "\n";
        return kSchema;
      }
    } else {
      r = solve_scheme(args.scheme, s, opt);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoConvergence;
  }
  std::cout << solve_result_to_json(r, args.scheme).dump(2) << "\n";
  if (!r.converged) {
    std::cerr << "warning: dual solver stopped at the iteration limit (" << r.iterations
              << " iterations)\n";
    return kNoConvergence;
  }
  if (r.gap_flag) std::cerr << "note: relative duality gap above 1e-3\n";
  return kOk;
}

struct VerifyArgs {
  std::string scenario;
  std::vector<int> random;
  std::uint64_t seed = 7;
  double pass_tol = 1e-2;
  std::string method = "ellipsoid";
};

int cmd_verify(const VerifyArgs& args, double tolerance) {
  std::vector<Scenario> instances;
  try {
    if (!args.random.empty()) {
      const int N = args.random[0], K = args.random[1], count = args.random[2];
      if (N < 1 || K < 1 || count < 1) throw SchemaError("--random needs positive N K count");
      for (int i = 0; i < count; ++i) instances.push_back(random_scenario(N, K, args.seed, i));
    } else if (!args.scenario.empty()) {
      instances.push_back(load_scenario(args.scenario));
      require_valid(instances.back());
    } else {
      throw SchemaError("verify needs a scenario file or --random N K count");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchema;
  }

  const std::uint64_t budget = oracle_budget();
  const DcdmOptions opt = dcdm_options(tolerance, args.method, false);
  json report;
  report["instances"] = json::array();
  int passed = 0;
  bool all_converged = true;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Scenario& s = instances[i];
    SolveResult oracle;
    try {
      oracle = brute_force_solve(s, budget);
    } catch (const BudgetExceeded& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kBudget;
    }
    SolveResult joint;
    try {
      joint = dcdm_solve(s, opt);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kNoConvergence;
    }
    all_converged = all_converged && joint.converged;
    const double scale = std::max({std::abs(oracle.primal_value), std::abs(joint.primal_value),
                                   1e-300});
    const double rel = std::abs(joint.primal_value - oracle.primal_value) / scale;
    const bool ok = rel <= args.pass_tol;
    passed += ok;
    report["instances"].push_back({{"index", i},
                                   {"dcdm", joint.primal_value},
                                   {"oracle", oracle.primal_value},
                                   {"relative_difference", rel},
                                   {"pass", ok}});
  }
  report["passed"] = passed;
  report["total"] = instances.size();
  report["tolerance"] = args.pass_tol;
  std::cout << report.dump(2) << "\n";
  std::cerr << passed << "/" << instances.size() << " pass\n";
  if (!all_converged) return kNoConvergence;
  return passed == static_cast<int>(instances.size()) ? kOk : kMismatch;
}

struct ExperimentArgs {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
};

int cmd_experiment(const ExperimentArgs& args, int threads) {
  ExperimentConfig c;
  try {
    c = load_experiment_config(args.config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchema;
  }
  if (args.seed) c.master_seed = *args.seed;
  const ExperimentResult result = run_experiment(c, threads);
  const std::string csv = results_to_csv(result.rows);
  if (args.output.empty() || args.output == "-") {
    std::cout << csv;
  } else {
    if (!write_file(args.output, csv)) {
      std::cerr << "error: cannot write " << args.output << "\n";
      return kSchema;
    }
    std::cout << "wrote " << result.rows.size() << " rows to " << args.output << "\n";
    for (const auto& r : result.rows) {
      std::cout << "  " << r.grid_param << "=" << r.grid_value << "  " << r.scheme << "  "
                << r.mean_rate << " +- " << r.stderr_rate << "  (" << r.trials_ok << " ok, "
                << r.trials_failed << " failed)\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint channel pairing, user assignment and power allocation for relay networks"};
  app.require_subcommand(1);

  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double tolerance = 1e-9;
  app.add_option("--threads", threads, "Worker threads for experiments")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerance, "Relative tolerance of the dual solver")
      ->check(CLI::PositiveNumber);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve one scenario and print JSON");
  s->add_option("scenario", solve.scenario, "Scenario JSON file")->required();
  s->add_option("--scheme", solve.scheme, "joint | no_pairing | no_pa | separate | max_gain");
  s->add_option("--trace", solve.trace, "Write dual iterations as CSV");
  s->add_option("--method", solve.method, "Dual method")
      ->check(CLI::IsMember({"ellipsoid", "subgradient"}));
  s->add_option("--tolerance", tolerance, "Relative tolerance of the dual solver")
      ->check(CLI::PositiveNumber);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Compare the joint solver with exhaustive search");
  v->add_option("scenario", verify.scenario, "Scenario JSON file");
  v->add_option("--random", verify.random, "N K count: random instances")->expected(3);
  v->add_option("--seed", verify.seed, "Seed for --random");
  v->add_option("--pass-tolerance", verify.pass_tol, "Relative agreement required");
  v->add_option("--method", verify.method, "Dual method")
      ->check(CLI::IsMember({"ellipsoid", "subgradient"}));
  v->add_option("--tolerance", tolerance, "Relative tolerance of the dual solver")
      ->check(CLI::PositiveNumber);

  ExperimentArgs experiment;
  auto* e = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  e->add_option("config", experiment.config, "Experiment config JSON")->required();
  e->add_option("-o,--output", experiment.output, "CSV output path ('-' for stdout)");
  e->add_option("--seed", experiment.seed, "Override the config seed");
  e->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kSchema;
  }

  if (*s) return cmd_solve(solve, tolerance);
  if (*v) return cmd_verify(verify, tolerance);
  return cmd_experiment(experiment, threads);
}
