#include "relayopt/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relayopt/power.hpp"
#include "relayopt/rates.hpp"

namespace relayopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_positive(const auto& m) {
  double out = kInf;
  for (Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    if (v > 0) out = std::min(out, v);
  }
  return out;
}

// Keeps the distinct assignments of the most recent evaluations.
class CandidateRing {
 public:
  explicit CandidateRing(std::size_t capacity) : capacity_(capacity) {}

  void push(double g, const Assignment& a) {
    if (entries_.size() == capacity_) entries_.erase(entries_.begin());
    entries_.push_back({g, a});
  }

  // Assignments whose g is within rel of best_g, best assignment first.
  std::vector<Assignment> near(double best_g, const Assignment& best, double rel) const {
    std::vector<Assignment> out{best};
    const double cut = best_g + rel * std::max(std::abs(best_g), 1e-300);
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      if (it->first > cut) continue;
      if (std::find(out.begin(), out.end(), it->second) == out.end()) out.push_back(it->second);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<std::pair<double, Assignment>> entries_;
};

constexpr std::size_t kRingSize = 40;
constexpr double kCandidateBand = 1e-4;

// Direction that moves away from prices at which a path becomes unbounded.
Vec3 unbounded_escape(const Multipliers& lambda) {
  if (source_price(lambda) <= 0) return Vec3(1, 0, 1);
  return Vec3(0, 1, 1);
}

}  // namespace

bool Region::contains(const Vec3& lambda, double tol) const {
  if ((lambda.array() < 0).any()) return false;
  if (kind == RegionKind::kNonneg || kind == RegionKind::kNone) return true;
  return coeff.dot(lambda) >= threshold * (1 - tol);
}

Region nonneg_region() { return {}; }

Region make_r1(double eps1) { return {RegionKind::kR1, Vec3(1, 0, 1), eps1}; }

Region make_r2(double eps2, double slope) {
  return {RegionKind::kR2, Vec3(1, slope, 1 + slope), eps2};
}

RegionThresholds region_thresholds(const Scenario& s) {
  RegionThresholds out;
  const double min_w = min_positive(s.w);
  const double min_a = min_positive(s.a);
  const double min_c = min_positive(s.c);
  const double max_a = s.a.maxCoeff();
  const double max_b = s.b.maxCoeff();
  const double p = std::min(s.p_s, s.p_t);
  if (!std::isfinite(min_w) || !std::isfinite(min_a)) return out;
  if (std::isfinite(min_c)) {
    out.eps1 = min_w * std::min(min_a, min_c) / (4 * kAlpha * (max_a * p + 1));
  }
  if (max_b > 0) {
    out.eps2 = min_w / (kAlpha * (p + 1 / min_a));
    out.slope = min_a / max_b;
  }
  return out;
}

Vec3 project(const Vec3& point, const Region& region) {
  if (region.kind == RegionKind::kNonneg || region.kind == RegionKind::kNone ||
      region.coeff.isZero()) {
    return point.cwiseMax(0.0);
  }
  const double t = region.threshold;
  const double slack = 1e-12 * (std::abs(t) + point.cwiseAbs().maxCoeff());
  Vec3 best = point.cwiseMax(0.0);
  double best_d = kInf;
  for (int mask = 0; mask < 8; ++mask) {
    for (int active = 0; active < 2; ++active) {
      Vec3 x = point;
      Vec3 cf = region.coeff;
      for (int i = 0; i < 3; ++i) {
        if (mask & (1 << i)) {
          x(i) = 0.0;
          cf(i) = 0.0;
        }
      }
      if (active) {
        const double nn = cf.squaredNorm();
        if (nn == 0) continue;
        x += (t - cf.dot(x)) / nn * cf;
      }
      if ((x.array() < -slack).any() || region.coeff.dot(x) < t - slack) continue;
      const double d = (x - point).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = x;
      }
    }
  }
  return best.cwiseMax(0.0);
}

double lambda_max(const Scenario& s) {
  const double N = s.n_channels;
  return std::sqrt(2.0) * N * N * s.w.sum() / (kAlpha * std::min({s.p_s, s.p_r, s.p_t}));
}

double theta_max(const Scenario& s, const Region& region) {
  if (region.kind != RegionKind::kR1 && region.kind != RegionKind::kR2) return kInf;
  const double eps = region.threshold;
  const int N = s.n_channels;
  double source = 0.0;
  double relay = 0.0;
  for (int k = 0; k < s.n_users; ++k) {
    source = std::max(source, s.w(k));
    for (int m = 0; m < N; ++m) {
      for (int n = 0; n < N; ++n) {
        const double a = s.a(m), b = s.b(n, k), c = s.c(m, k);
        if (b <= 0) continue;
        if (region.kind == RegionKind::kR1) {
          if (a > c) relay = std::max(relay, s.w(k) * (a - c) / b);
        } else {
          relay = std::max(relay, s.w(k) * a / b);
        }
      }
    }
  }
  const double us = N * source / (kAlpha * eps);
  const double ur = N * relay / (kAlpha * eps);
  const Vec3 limits = s.limits();
  double out = 0.0;
  for (double x : {0.0, us}) {
    for (double y : {0.0, ur}) out = std::max(out, (limits - Vec3(x, y, x + y)).norm());
  }
  return out;
}

DualEvaluation dual_value(const Scenario& s, const Multipliers& lambda, PairingPolicy policy) {
  const ChannelAssignment ca = assign_channels(s, lambda, policy);
  DualEvaluation out;
  out.assignment = ca.assignment;
  out.powers = PowerAllocation::zeros(s.n_channels);
  const double S = source_price(lambda);
  const double R = relay_price(lambda);
  for (int m = 0; m < s.n_channels; ++m) {
    const PathGains g = path_gains(s, m, ca.assignment.pairing[m], ca.assignment.user_of_pair[m]);
    const PathPowerSolution sol = path_power(s.strategy, g, S, R);
    out.powers.ps(m) = sol.ps_unit;
    out.powers.pr(m) = sol.pr_unit;
  }
  out.g = ca.value + lambda.dot(s.limits());
  out.subgradient = s.limits() - out.powers.usage();
  return out;
}

Vec3 subgradient(const Scenario& s, const Multipliers& lambda, PairingPolicy policy) {
  return dual_value(s, lambda, policy).subgradient;
}

StepRule hybrid_step_rule(double lambda_max, double theta_max, double g0) {
  StepRule rule;
  rule.kind = StepKind::kHybrid;
  rule.nu = lambda_max;
  rule.floor_length = 1e-3 * std::abs(g0) / theta_max;
  const double ratio = lambda_max / rule.floor_length;
  rule.switch_iteration = static_cast<long>(std::min(std::ceil(ratio * ratio), 9e18));
  return rule;
}

DualSolveResult subgradient_solve(const Scenario& s, const Region& region, const StepRule& rule,
                                  const Vec3& start, const SubgradientOptions& opt) {
  DualSolveResult out;
  Vec3 lambda = project(start, region);
  out.best_g = kInf;
  out.lambda = lambda;
  Assignment best_assignment;
  CandidateRing ring(kRingSize);
  std::vector<double> best_history;
  best_history.reserve(opt.max_iter);

  for (int l = 1; l <= opt.max_iter; ++l) {
    out.iterations = l;
    double length_hint = rule.nu / std::sqrt(static_cast<double>(l));
    DualEvaluation ev;
    try {
      ev = dual_value(s, lambda, opt.policy);
    } catch (const UnboundedSubproblem&) {
      lambda = project(lambda + length_hint * unbounded_escape(lambda).normalized(), region);
      best_history.push_back(out.best_g);
      continue;
    }
    const Vec3 theta = ev.subgradient;
    const double tn = theta.norm();
    out.max_theta_norm = std::max(out.max_theta_norm, tn);
    if (opt.record_trace) out.trace.push_back({region.kind, l, ev.g, tn, lambda});
    ring.push(ev.g, ev.assignment);
    if (ev.g < out.best_g) {
      out.best_g = ev.g;
      out.lambda = lambda;
      best_assignment = ev.assignment;
    }
    best_history.push_back(out.best_g);

    if (tn == 0) {
      out.converged = true;
      break;
    }
    if (l > opt.window) {
      const double before = best_history[l - 1 - opt.window];
      if (before - out.best_g <= opt.tol * std::abs(out.best_g)) {
        out.converged = true;
        break;
      }
    }

    Vec3 step;
    switch (rule.kind) {
      case StepKind::kConstantSize:
        step = rule.nu * theta;
        break;
      case StepKind::kConstantLength:
        step = rule.nu * theta / tn;
        break;
      case StepKind::kNonsumSqsum:
        step = rule.nu / l * theta;
        break;
      case StepKind::kHybrid:
        step = std::max(length_hint, rule.floor_length) * theta / tn;
        break;
    }
    lambda = project(lambda - step, region);
  }
  if (std::isfinite(out.best_g)) {
    out.candidates = ring.near(out.best_g, best_assignment, kCandidateBand);
  }
  return out;
}

DualSolveResult ellipsoid_solve(const Scenario& s, const Region& region, const Vec3& start,
                                double radius, const EllipsoidOptions& opt) {
  DualSolveResult out;
  Vec3 center = project(start, region);
  Mat3 shape = Mat3::Identity() * radius * radius;
  out.best_g = kInf;
  out.lambda = center;
  double lower = -kInf;
  Assignment best_assignment;
  CandidateRing ring(kRingSize);

  for (int it = 1; it <= opt.max_iter; ++it) {
    out.iterations = it;
    Vec3 cut;
    Index most_negative;
    if (center.minCoeff(&most_negative) < 0) {
      cut = -Vec3::Unit(most_negative);
    } else if (!region.contains(center, 0.0)) {
      cut = -region.coeff;
    } else {
      DualEvaluation ev;
      bool bounded = true;
      try {
        ev = dual_value(s, center, opt.policy);
      } catch (const UnboundedSubproblem&) {
        bounded = false;
      }
      if (!bounded) {
        cut = -unbounded_escape(center);
      } else {
        const Vec3& theta = ev.subgradient;
        const double tn = theta.norm();
        out.max_theta_norm = std::max(out.max_theta_norm, tn);
        if (opt.record_trace) out.trace.push_back({region.kind, it, ev.g, tn, center});
        ring.push(ev.g, ev.assignment);
        if (ev.g < out.best_g) {
          out.best_g = ev.g;
          out.lambda = center;
          best_assignment = ev.assignment;
        }
        lower = std::max(lower, ev.g - std::sqrt(std::max(0.0, theta.dot(shape * theta))));
        if (tn == 0 || out.best_g - lower <= opt.tol * std::abs(out.best_g)) {
          out.converged = true;
          break;
        }
        cut = theta;
      }
    }
    const Vec3 pc = shape * cut;
    const double q = cut.dot(pc);
    if (!(q > 0)) break;
    const Vec3 gt = pc / std::sqrt(q);
    center -= gt / 4.0;
    shape = 9.0 / 8.0 * (shape - 0.5 * gt * gt.transpose());
    shape = 0.5 * (shape + shape.transpose()).eval();
  }
  if (std::isfinite(out.best_g)) {
    out.candidates = ring.near(out.best_g, best_assignment, kCandidateBand);
  }
  return out;
}

RecoveredPrimal recover_primal(const Scenario& s, const Multipliers& lambda,
                               PairingPolicy policy) {
  const DualEvaluation ev = dual_value(s, lambda, policy);
  RecoveredPrimal out;
  out.assignment = ev.assignment;
  out.powers = ev.powers;
  const double scale = feasibility_scale(s, out.powers);
  if (scale < 1.0) {
    out.powers.ps *= scale;
    out.powers.pr *= scale;
  }
  out.primal_value = weighted_sum_rate(s, out.assignment, out.powers);
  return out;
}

RecoveredPrimal polish_primal(const Scenario& s, const Multipliers& lambda,
                              const std::vector<Assignment>& candidates,
                              PairingPolicy policy) {
  RecoveredPrimal best;
  best.primal_value = -kInf;
  try {
    best = recover_primal(s, lambda, policy);
  } catch (const UnboundedSubproblem&) {
    // lambda came from a problem with the direct links removed
  }
  for (const Assignment& a : candidates) {
    const FixedPowerResult fixed = allocate_power(s, a);
    const double v = weighted_sum_rate(s, a, fixed.powers);
    if (v > best.primal_value) best = {a, fixed.powers, v};
  }
  if (!std::isfinite(best.primal_value)) {
    best.assignment = identity_assignment(s.n_channels);
    best.powers = PowerAllocation::zeros(s.n_channels);
    best.primal_value = 0.0;
  }
  return best;
}

RecoveredPrimal local_search_primal(const Scenario& s, const RecoveredPrimal& start,
                                    PairingPolicy policy) {
  RecoveredPrimal best = start;
  const int N = s.n_channels;
  auto score = [&](const Assignment& a) {
    const FixedPowerResult fixed = allocate_power(s, a);
    return RecoveredPrimal{a, fixed.powers, weighted_sum_rate(s, a, fixed.powers)};
  };
  auto improves = [&](const RecoveredPrimal& r) {
    return r.primal_value > best.primal_value + 1e-12 * std::abs(best.primal_value);
  };
  bool improved = true;
  while (improved) {
    improved = false;
    if (policy == PairingPolicy::kOptimal) {
      for (int i = 0; i < N && !improved; ++i) {
        for (int j = i + 1; j < N && !improved; ++j) {
          Assignment a = best.assignment;
          std::swap(a.pairing[i], a.pairing[j]);
          std::swap(a.user_of_pair[i], a.user_of_pair[j]);
          if (RecoveredPrimal r = score(a); improves(r)) {
            best = std::move(r);
            improved = true;
          }
        }
      }
    }
    for (int m = 0; m < N && !improved; ++m) {
      for (int k = 0; k < s.n_users && !improved; ++k) {
        if (k == best.assignment.user_of_pair[m]) continue;
        Assignment a = best.assignment;
        a.user_of_pair[m] = k;
        if (RecoveredPrimal r = score(a); improves(r)) {
          best = std::move(r);
          improved = true;
        }
      }
    }
  }
  return best;
}

bool region_consistent(const Scenario& solved, const Assignment& assignment,
                       const Multipliers& lambda, double tol) {
  bool direct = false;
  for (int m = 0; m < assignment.size(); ++m) {
    if (solved.c(m, assignment.user_of_pair[m]) > 0) direct = true;
  }
  const RegionThresholds th = region_thresholds(solved);
  if (direct) return th.eps1 && make_r1(*th.eps1).contains(lambda, tol);
  return th.eps2 && make_r2(*th.eps2, th.slope).contains(lambda, tol);
}

namespace {

struct Branch {
  Region region;
  Scenario solved;
  DualSolveResult dual;
  RecoveredPrimal primal;
  double theta_bound = 0.0;
};

Branch run_branch(const Scenario& original, Scenario solved, const Region& region,
                  const DcdmOptions& opt) {
  Branch br{region, std::move(solved), {}, {}, 0.0};
  const double lm = lambda_max(original);
  const Vec3 start = Vec3::Constant(lm / (2 * std::sqrt(3.0)));
  br.theta_bound = theta_max(br.solved, region);
  if (opt.method == DualMethod::kEllipsoid) {
    EllipsoidOptions eo;
    eo.max_iter = opt.max_iter;
    eo.tol = opt.tolerance;
    eo.policy = opt.policy;
    eo.record_trace = opt.record_trace;
    br.dual = ellipsoid_solve(br.solved, region, start, 2 * lm, eo);
  } else {
    SubgradientOptions so;
    so.max_iter = opt.max_iter;
    so.tol = opt.tolerance;
    so.policy = opt.policy;
    so.record_trace = opt.record_trace;
    StepRule rule;
    if (opt.step_rule) {
      rule = *opt.step_rule;
    } else {
      const double g0 = dual_value(br.solved, project(start, region), opt.policy).g;
      rule = hybrid_step_rule(lm, br.theta_bound, g0);
    }
    br.dual = subgradient_solve(br.solved, region, rule, start, so);
  }
  br.primal = polish_primal(original, br.dual.lambda, br.dual.candidates, opt.policy);
  return br;
}

double original_dual(const Scenario& s, const Multipliers& lambda, PairingPolicy policy) {
  try {
    return dual_value(s, lambda, policy).g;
  } catch (const UnboundedSubproblem&) {
    return kInf;
  }
}

}  // namespace

DcdmResult dcdm_solve_traced(const Scenario& s, const DcdmOptions& opt) {
  require_valid(s);
  const RegionThresholds th = region_thresholds(s);
  const bool any_direct = (s.c.array() > 0).any();

  std::vector<Branch> branches;
  if (any_direct && th.eps1) branches.push_back(run_branch(s, s, make_r1(*th.eps1), opt));
  if (th.eps2) {
    branches.push_back(run_branch(s, s.without_direct_links(), make_r2(*th.eps2, th.slope), opt));
  }
  if (branches.empty()) throw InvalidScenario("no region applies to this scenario");

  // Dual bound of each branch on the original problem. The R2 branch solves
  // the instance without direct links, so its best_g is not comparable.
  std::vector<double> bound(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& br = branches[i];
    bound[i] = br.solved.c.isZero() && any_direct ? original_dual(s, br.dual.lambda, opt.policy)
                                                  : br.dual.best_g;
  }

  // Both branches yield feasible points of the original problem; keep the
  // better one, and on a tie the one with the tighter bound.
  std::size_t pick = 0;
  for (std::size_t i = 1; i < branches.size(); ++i) {
    const double a = branches[pick].primal.primal_value;
    const double b = branches[i].primal.primal_value;
    const double tie = 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300});
    if (b > a + tie || (std::abs(b - a) <= tie && bound[i] < bound[pick])) pick = i;
  }

  DcdmResult out;
  SolveResult& r = out.solution;
  const Branch& chosen = branches[pick];
  r.assignment = chosen.primal.assignment;
  r.powers = chosen.primal.powers;
  r.primal_value = chosen.primal.primal_value;
  r.per_path_rates = path_rates(s, r.assignment, r.powers);
  r.region_used = chosen.region.kind;
  r.lambda = chosen.dual.lambda;
  r.lambda_max = lambda_max(s);
  r.dual_value = kInf;
  r.converged = true;
  double worst_ratio = -1.0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const Branch& br = branches[i];
    r.iterations += br.dual.iterations;
    r.converged = r.converged && br.dual.converged;
    r.dual_value = std::min(r.dual_value, bound[i]);
    const double ratio = br.dual.max_theta_norm / br.theta_bound;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      r.theta_max = br.theta_bound;
      r.max_theta_norm = br.dual.max_theta_norm;
    }
    out.trace.insert(out.trace.end(), br.dual.trace.begin(), br.dual.trace.end());
  }
  r.gap = r.dual_value - r.primal_value;
  r.gap_flag = r.gap > 1e-3 * std::max(std::abs(r.dual_value), 1e-300);
  if (r.gap_flag) {
    // The dual bound does not certify the recovered point; search nearby
    // assignments for a better one.
    const RecoveredPrimal improved =
        local_search_primal(s, {r.assignment, r.powers, r.primal_value}, opt.policy);
    if (improved.primal_value > r.primal_value) {
      r.assignment = improved.assignment;
      r.powers = improved.powers;
      r.primal_value = improved.primal_value;
      r.per_path_rates = path_rates(s, r.assignment, r.powers);
      r.gap = r.dual_value - r.primal_value;
      r.note = "primal improved by local search";
    }
  }
  r.region_consistent = region_consistent(chosen.solved, r.assignment, r.lambda);
  return out;
}

SolveResult dcdm_solve(const Scenario& scenario, const DcdmOptions& options) {
  return dcdm_solve_traced(scenario, options).solution;
}

}  // namespace relayopt
