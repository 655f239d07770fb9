#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "relayopt/types.hpp"

namespace relayopt {

enum class Strategy { kDF, kAF, kAFUpper };

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);

/// One coherence block of the dual-hop relay network.
///
/// Gains are normalized by the receiver noise variance, so a(m) * ps is the
/// first-hop SNR on channel m. `b` and `c` are N x K (channel, user).
struct Scenario {
  int n_channels = 0;
  int n_users = 0;
  VecX a;
  MatX b;
  MatX c;
  VecX w;
  double p_s = 0.0;
  double p_r = 0.0;
  double p_t = 0.0;
  Strategy strategy = Strategy::kDF;

  Vec3 limits() const { return {p_s, p_r, p_t}; }

  // Copy with every direct source-user gain set to zero.
  Scenario without_direct_links() const;
};

// Every violated invariant, as human-readable messages. Empty means valid.
std::vector<std::string> validate(const Scenario& scenario);

// Throws InvalidScenario listing every violation.
void require_valid(const Scenario& scenario);

/// Channel pairing plus per-pair user selection. Indices are zero-based:
/// first-hop channel m is paired with second-hop channel pairing[m] and the
/// pair is served to user user_of_pair[m].
struct Assignment {
  std::vector<int> pairing;
  std::vector<int> user_of_pair;

  int size() const { return static_cast<int>(pairing.size()); }
  bool operator==(const Assignment&) const = default;
};

Assignment identity_assignment(int n_channels);

// Structural check: pairing is a permutation and users are in range.
bool is_valid(const Assignment& assignment, int n_users);

// Binary assignment tensor; phi[k](m, n) == 1 iff path (m, n, k) is selected.
using PhiTensor = std::vector<MatX>;

PhiTensor to_tensor(const Assignment& assignment, int n_users);

// Row and column sums over (n, k) and (m, k) all equal one.
bool satisfies_pairing_constraints(const PhiTensor& phi, double tol = 1e-12);

// Inverse of to_tensor. Throws Error if phi is not a binary assignment.
Assignment from_tensor(const PhiTensor& phi);

/// Per-path source and relay powers, indexed by first-hop channel.
struct PowerAllocation {
  VecX ps;
  VecX pr;

  static PowerAllocation zeros(int n_channels);
  // (sum ps, sum pr, sum ps + pr)
  Vec3 usage() const;
};

inline constexpr double kFeasibilityTol = 1e-9;

// Nonnegative and within every limit up to kFeasibilityTol * limit.
bool is_feasible(const Scenario& scenario, const PowerAllocation& powers,
                 double rel_tol = kFeasibilityTol);

// Largest s in (0, 1] such that s * powers satisfies all three limits.
double feasibility_scale(const Scenario& scenario, const PowerAllocation& powers);

// Lagrange multipliers (ls, lr, lt) for the source, relay and total limits.
using Multipliers = Vec3;

inline double source_price(const Multipliers& lambda) { return lambda(0) + lambda(2); }
inline double relay_price(const Multipliers& lambda) { return lambda(1) + lambda(2); }

enum class RegionKind { kR1, kR2, kNonneg, kNone };

std::string_view to_string(RegionKind kind);

struct SolveResult {
  Assignment assignment;
  PowerAllocation powers;
  double primal_value = 0.0;
  double dual_value = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  RegionKind region_used = RegionKind::kNone;
  VecX per_path_rates;

  Multipliers lambda = Multipliers::Zero();
  bool converged = true;
  // Relative duality gap above 1e-3 after recovery.
  bool gap_flag = false;
  // Post-hoc region membership of lambda against the selected assignment.
  bool region_consistent = true;
  double lambda_max = 0.0;
  double theta_max = 0.0;
  double max_theta_norm = 0.0;
  std::string note;
};

}  // namespace relayopt
