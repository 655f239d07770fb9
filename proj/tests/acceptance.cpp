// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "json.hpp"
#include "relayopt/baselines.hpp"
#include "relayopt/dual.hpp"
#include "relayopt/io.hpp"
#include "relayopt/oracle.hpp"
#include "relayopt/power.hpp"
#include "relayopt/sim.hpp"

using namespace relayopt;

namespace {

constexpr double kOracleTol = 1e-2;
constexpr double kDominanceSlack = 1e-6;
constexpr double kKktTol = 1e-8;
constexpr double kKktStep = 1e-4;
constexpr double kAfGridTol = 1e-4;
constexpr double kGainLo = 0.05;
constexpr double kGainHi = 0.25;
constexpr std::uint64_t kSeed = 2026;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s  C%d %-22s %s  [%.1f s]\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(),
              seconds);
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int hardware_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// Bound and region tallies shared by criteria 1-4.
struct BoundTally {
  int instances = 0;
  int lambda_violations = 0;
  int theta_violations = 0;
  int converged = 0;
  int region_violations = 0;
  double worst_lambda_ratio = 0;
  double worst_theta_ratio = 0;

  void add(const SolveResult& r, bool check_region) {
    ++instances;
    const double lr = r.lambda.norm() / r.lambda_max;
    const double tr = r.max_theta_norm / r.theta_max;
    worst_lambda_ratio = std::max(worst_lambda_ratio, lr);
    worst_theta_ratio = std::max(worst_theta_ratio, tr);
    lambda_violations += lr > 1.0;
    theta_violations += tr > 1.0;
    if (check_region && r.converged) {
      ++converged;
      region_violations += !r.region_consistent;
    }
  }
};

BoundTally bounds;

void oracle_equivalence() {
  Timer t;
  int pass = 0, flagged = 0, total = 0;
  double worst = 0;
  for (int N = 2; N <= 3; ++N) {
    for (int K = 2; K <= 3; ++K) {
      for (int i = 0; i < 25; ++i) {
        const Scenario s = random_scenario(N, K, kSeed, 100 * (N * 4 + K) + i);
        const SolveResult r = dcdm_solve(s);
        const SolveResult o = brute_force_solve(s);
        const double rel = std::abs(r.primal_value - o.primal_value) /
                           std::max(std::abs(o.primal_value), 1e-300);
        worst = std::max(worst, rel);
        pass += rel <= kOracleTol;
        flagged += r.gap_flag;
        ++total;
        bounds.add(r, true);
      }
    }
  }
  report(1, "oracle equivalence", pass == total,
         fmt("%d/%d within %.0e relative, worst %.3e, %d with duality gap > 1e-3", pass, total,
             kOracleTol, worst, flagged),
         t.seconds());
}

void dominance() {
  Timer t;
  int violations = 0, order_violations = 0;
  double worst = INFINITY;
  std::string worst_scheme;
  for (int i = 0; i < 500; ++i) {
    const Scenario s = random_scenario(8, 4, kSeed + 1, i);
    const SolveResult joint = dcdm_solve(s);
    bounds.add(joint, true);
    double no_pa = 0, max_gain = 0;
    for (std::string_view id : kSchemeIds) {
      if (id == "joint") continue;
      const SolveResult r = solve_scheme(id, s);
      if (id == "no_pairing") bounds.add(r, false);
      if (id == "no_pa") no_pa = r.primal_value;
      if (id == "max_gain") max_gain = r.primal_value;
      const double slack = joint.primal_value - r.primal_value;
      if (slack < worst) {
        worst = slack;
        worst_scheme = id;
      }
      violations += slack < -kDominanceSlack;
    }
    order_violations += max_gain > no_pa;
  }
  report(2, "dominance", violations == 0 && order_violations == 0,
         fmt("500 instances N=8 K=4: %d joint violations (slack %.0e), worst slack %.3e (%s), "
             "%d max_gain > no_pa",
             violations, kDominanceSlack, worst, worst_scheme.c_str(), order_violations),
         t.seconds());
}

void bound_conformance() {
  report(3, "bound conformance", bounds.lambda_violations == 0 && bounds.theta_violations == 0,
         fmt("%d solves: %d |lambda| > lambda_max (worst ratio %.3e), %d |theta| > theta_max "
             "(worst ratio %.3e)",
             bounds.instances, bounds.lambda_violations, bounds.worst_lambda_ratio,
             bounds.theta_violations, bounds.worst_theta_ratio),
         0.0);
}

void region_consistency() {
  report(4, "region consistency", bounds.region_violations == 0,
         fmt("%d converged joint solves, %d violations", bounds.converged,
             bounds.region_violations),
         0.0);
}

void fig3_regime() {
  Timer t;
  ExperimentConfig c = load_experiment_config(RELAYOPT_PRESET_DIR "/fig3.json");
  c.trials = 200;
  c.schemes = {"joint", "separate"};
  const ExperimentResult r = run_experiment(c, hardware_threads());
  bool dominated = true;
  double gain4 = NAN;
  std::string points;
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    const double joint = r.rows[2 * g].mean_rate;
    const double sep = r.rows[2 * g + 1].mean_rate;
    dominated = dominated && joint > sep && r.rows[2 * g].trials_failed == 0;
    if (c.grid[g] == 4.0) gain4 = joint / sep - 1;
    points += fmt(" %gdB:%.4f/%.4f", c.grid[g], joint, sep);
  }
  const bool in_band = gain4 >= kGainLo && gain4 <= kGainHi;
  report(5, "fig3 regime", dominated && in_band,
         fmt("joint/separate%s; gain at 4 dB %.2f%% (band %.0f-%.0f%%)", points.c_str(),
             100 * gain4, 100 * kGainLo, 100 * kGainHi),
         t.seconds());
}

void fig5_regime() {
  Timer t;
  ExperimentConfig c = load_experiment_config(RELAYOPT_PRESET_DIR "/fig5.json");
  c.grid = {2, 4, 6};
  c.trials = 200;
  c.schemes = {"joint"};
  const ExperimentResult r = run_experiment(c, hardware_threads());
  bool increasing = true;
  std::string points;
  for (std::size_t g = 0; g < r.rows.size(); ++g) {
    if (g > 0) increasing = increasing && r.rows[g].mean_rate > r.rows[g - 1].mean_rate;
    points += fmt(" K=%g:%.4f", r.rows[g].grid_value, r.rows[g].mean_rate);
  }
  report(6, "fig5 regime", increasing,
         fmt("mean joint rate%s (strictly increasing required)", points.c_str()), t.seconds());
}

// Best AF per-path Lagrangian on a 400x400 grid over [0, 10/min price]^2,
// refined by zooming around the incumbent.
double af_grid_best(const PathGains& g, double S, double R) {
  const double hi = 10.0 / std::min(S, R);
  double x0 = 0, x1 = hi, y0 = 0, y1 = hi, best = 0, bx = 0, by = 0;
  for (int round = 0; round < 12; ++round) {
    const int n = round == 0 ? 400 : 60;
    const double dx = (x1 - x0) / n, dy = (y1 - y0) / n;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double v = path_lagrangian(Strategy::kAF, g, S, R, x0 + i * dx, y0 + j * dy);
        if (v > best) best = v, bx = x0 + i * dx, by = y0 + j * dy;
      }
    }
    x0 = std::max(0.0, bx - 6 * dx), x1 = bx + 6 * dx;
    y0 = std::max(0.0, by - 6 * dy), y1 = by + 6 * dy;
  }
  return best;
}

void kkt_suite() {
  Timer t;
  std::mt19937_64 rng(kSeed);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::bernoulli_distribution no_direct(0.15);
  int kkt_bad = 0;
  double worst_gain = -INFINITY;
  for (int i = 0; i < 10000; ++i) {
    const PathGains g{u(rng), e(rng), e(rng), no_direct(rng) ? 0.0 : e(rng)};
    const double S = u(rng), R = u(rng);
    const PathPowerSolution sol = df_path_power(g, S, R);
    const double base = path_lagrangian(Strategy::kDF, g, S, R, sol.ps_unit, sol.pr_unit);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const double ps = sol.ps_unit + dx * kKktStep, pr = sol.pr_unit + dy * kKktStep;
        if ((dx == 0 && dy == 0) || ps < 0 || pr < 0) continue;
        const double gain = path_lagrangian(Strategy::kDF, g, S, R, ps, pr) - base;
        worst_gain = std::max(worst_gain, gain);
        kkt_bad += gain > kKktTol;
      }
    }
  }
  int af_bad = 0;
  double af_worst = 0;
  for (int i = 0; i < 100; ++i) {
    const PathGains g{u(rng), e(rng), e(rng), no_direct(rng) ? 0.0 : e(rng)};
    const double S = u(rng), R = u(rng);
    const double mine = af_path_power(g, S, R).lagrangian_unit;
    const double grid = af_grid_best(g, S, R);
    const double rel = std::abs(mine - grid) / std::max(std::abs(grid), 1e-12);
    af_worst = std::max(af_worst, rel);
    af_bad += rel > kAfGridTol;
  }
  report(7, "kkt and af grid", kkt_bad == 0 && af_bad == 0,
         fmt("10000 DF perturbation checks: %d improve by > %.0e (max change %.2e); 100 AF grid "
             "checks: %d beyond %.0e (worst %.2e)",
             kkt_bad, kKktTol, worst_gain, af_bad, kAfGridTol, af_worst),
         t.seconds());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism() {
  Timer t;
  nlohmann::json c = nlohmann::json::parse(slurp(RELAYOPT_PRESET_DIR "/fig3.json"));
  c["trials"] = 20;
  std::ofstream("acceptance_fig3.json") << c.dump();
  const std::string cli = RELAYOPT_CLI_PATH;
  auto run = [&](int threads, const char* out) {
    const std::string cmd = cli + " experiment acceptance_fig3.json --threads " +
                            std::to_string(threads) + " -o " + out + " > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const bool ran = run(1, "acc_t1a.csv") && run(1, "acc_t1b.csv") && run(4, "acc_t4.csv");
  const std::string a = slurp("acc_t1a.csv");
  const bool same = ran && !a.empty() && a == slurp("acc_t1b.csv") && a == slurp("acc_t4.csv");
  report(8, "determinism", same,
         fmt("fig3 preset, 20 trials: runs at 1, 1 and 4 threads %s (%zu bytes)",
             same ? "byte-identical" : "differ", a.size()),
         t.seconds());
}

}  // namespace

int main() {
  oracle_equivalence();
  dominance();
  bound_conformance();
  region_consistency();
  fig3_regime();
  fig5_regime();
  kkt_suite();
  determinism();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
