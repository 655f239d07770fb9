#pragma once

#include <optional>
#include <vector>

#include "relayopt/assign.hpp"
#include "relayopt/model.hpp"

namespace relayopt {

/// {lambda >= 0 : coeff . lambda >= threshold}. NONNEG has a zero coefficient.
struct Region {
  RegionKind kind = RegionKind::kNonneg;
  Vec3 coeff = Vec3::Zero();
  double threshold = 0.0;

  bool contains(const Vec3& lambda, double tol = 1e-12) const;
};

Region nonneg_region();

struct RegionThresholds {
  std::optional<double> eps1;  // absent when every direct gain is zero
  std::optional<double> eps2;  // absent when every relay gain is zero
  double slope = 0.0;          // R2 weight on the relay multiplier
};

RegionThresholds region_thresholds(const Scenario& scenario);

// R1: ls + lt >= eps1.  R2: ls + slope lr + (1 + slope) lt >= eps2.
Region make_r1(double eps1);
Region make_r2(double eps2, double slope);

// Euclidean projection, exact by enumerating active sets.
Vec3 project(const Vec3& point, const Region& region);

// Radius of a ball around the origin containing the dual minimizer.
double lambda_max(const Scenario& scenario);

// Largest subgradient norm attainable at a multiplier in `region`.
double theta_max(const Scenario& scenario, const Region& region);

struct DualEvaluation {
  double g = 0.0;
  Assignment assignment;
  PowerAllocation powers;  // unit powers on the selected paths
  Vec3 subgradient = Vec3::Zero();
};

DualEvaluation dual_value(const Scenario& scenario, const Multipliers& lambda,
                          PairingPolicy policy = PairingPolicy::kOptimal);

Vec3 subgradient(const Scenario& scenario, const Multipliers& lambda,
                 PairingPolicy policy = PairingPolicy::kOptimal);

enum class StepKind { kConstantSize, kConstantLength, kNonsumSqsum, kHybrid };

/// kConstantSize: lambda -= nu theta.  kConstantLength: moves nu along
/// -theta / |theta|.  kNonsumSqsum: lambda -= (nu / l) theta.
/// kHybrid: moves nu / sqrt(l) along -theta / |theta| until that drops below
/// `floor_length`, then moves floor_length.
struct StepRule {
  StepKind kind = StepKind::kHybrid;
  double nu = 1.0;
  double floor_length = 0.0;
  long switch_iteration = -1;  // first iteration at the floor (kHybrid)
};

// The default rule: nu = lambda_max, floor eps / theta_max with eps = 1e-3 g0.
StepRule hybrid_step_rule(double lambda_max, double theta_max, double g0);

struct TraceRecord {
  RegionKind region = RegionKind::kNone;
  int iteration = 0;
  double g = 0.0;
  double theta_norm = 0.0;
  Vec3 lambda = Vec3::Zero();
};

struct DualSolveResult {
  Vec3 lambda = Vec3::Zero();  // best iterate
  double best_g = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_theta_norm = 0.0;
  std::vector<Assignment> candidates;  // assignments seen near the optimum
  std::vector<TraceRecord> trace;
};

struct SubgradientOptions {
  int max_iter = 20000;
  double tol = 1e-6;  // relative improvement of best g over the window
  int window = 50;
  PairingPolicy policy = PairingPolicy::kOptimal;
  bool record_trace = false;
};

/// Projected subgradient descent from the projection of `start` onto `region`.
DualSolveResult subgradient_solve(const Scenario& scenario, const Region& region,
                                  const StepRule& rule, const Vec3& start,
                                  const SubgradientOptions& options = {});

struct EllipsoidOptions {
  int max_iter = 3000;
  double tol = 1e-9;  // relative width of the certified bracket on min g
  PairingPolicy policy = PairingPolicy::kOptimal;
  bool record_trace = false;
};

/// Central-cut ellipsoid method on the same dual oracle. Starts from the ball
/// of radius `radius` around the projection of `start`, and stops once the
/// best g is within tol of the ellipsoid lower bound.
DualSolveResult ellipsoid_solve(const Scenario& scenario, const Region& region,
                                const Vec3& start, double radius,
                                const EllipsoidOptions& options = {});

enum class DualMethod { kEllipsoid, kSubgradient };

struct DcdmOptions {
  DualMethod method = DualMethod::kEllipsoid;
  PairingPolicy policy = PairingPolicy::kOptimal;
  double tolerance = 1e-9;
  int max_iter = 3000;
  // Subgradient method only; when absent the hybrid rule is built per region.
  std::optional<StepRule> step_rule;
  bool record_trace = false;
};

struct DcdmResult {
  SolveResult solution;
  std::vector<TraceRecord> trace;  // both region solves, in order
};

/// Divide-and-conquer dual minimization: with direct links on R1, and with
/// direct links removed on R2. Each branch's primal is recovered on the
/// original scenario and the better one is returned.
DcdmResult dcdm_solve_traced(const Scenario& scenario, const DcdmOptions& options = {});
SolveResult dcdm_solve(const Scenario& scenario, const DcdmOptions& options = {});

struct RecoveredPrimal {
  Assignment assignment;
  PowerAllocation powers;
  double primal_value = 0.0;
};

/// Primal point from the dual maximizer at lambda, scaled back into the
/// power limits if needed. Rates use the scenario's exact rate function.
RecoveredPrimal recover_primal(const Scenario& scenario, const Multipliers& lambda,
                               PairingPolicy policy = PairingPolicy::kOptimal);

// Best of recover_primal and the optimal power allocation on every candidate.
RecoveredPrimal polish_primal(const Scenario& scenario, const Multipliers& lambda,
                              const std::vector<Assignment>& candidates,
                              PairingPolicy policy = PairingPolicy::kOptimal);

/// Hill climbing over assignments from `start`, each scored by its optimal
/// power allocation: swap the second-hop channels (with their users) of two
/// pairs, or move one pair to another user. Stops at a local optimum.
RecoveredPrimal local_search_primal(const Scenario& scenario, const RecoveredPrimal& start,
                                    PairingPolicy policy = PairingPolicy::kOptimal);

// Post-hoc region test for a solved branch: a selected path with a direct gain
// puts lambda in R1, otherwise lambda belongs to R2.
bool region_consistent(const Scenario& solved, const Assignment& assignment,
                       const Multipliers& lambda, double tol = 1e-9);

}  // namespace relayopt
