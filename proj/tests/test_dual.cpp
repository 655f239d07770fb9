#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "relayopt/dual.hpp"
#include "relayopt/oracle.hpp"
#include "relayopt/power.hpp"
#include "relayopt/rates.hpp"

using namespace relayopt;
using doctest::Approx;

TEST_CASE("projection") {
  const double eps = 0.3;
  const Region r1 = make_r1(eps);
  const Vec3 p = project(Vec3::Zero(), r1);
  CHECK(p(0) == Approx(eps / 2).epsilon(1e-14));
  CHECK(p(1) == 0.0);
  CHECK(p(2) == Approx(eps / 2).epsilon(1e-14));

  const Vec3 inside(0.4, 1.0, 0.2);
  CHECK(project(inside, r1) == inside);
  CHECK(project(Vec3(-1, 5, -1), nonneg_region()) == Vec3(0, 5, 0));
}

TEST_CASE("projection satisfies the obtuse-angle condition") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0, 2);
  for (const Region& region : {make_r1(0.7), make_r2(0.5, 0.3)}) {
    for (int i = 0; i < 200; ++i) {
      const Vec3 x(n(rng), n(rng), n(rng));
      const Vec3 p = project(x, region);
      CHECK(region.contains(p, 1e-9));
      for (int j = 0; j < 20; ++j) {
        Vec3 y(u(rng), u(rng), u(rng));
        if (!region.contains(y)) continue;
        CHECK((x - p).dot(y - p) <= 1e-9);
      }
    }
  }
}

TEST_CASE("region thresholds") {
  const Scenario s = test::single_path(1, 1, 1, 1, 1, 1);
  const RegionThresholds t = region_thresholds(s);
  REQUIRE(t.eps1.has_value());
  CHECK(*t.eps1 == Approx(1.0 / (8 * kAlpha)).epsilon(1e-14));
  CHECK(*t.eps1 == Approx(0.0902).epsilon(1e-3));

  Scenario no_direct = test::random_gains(3, 2, 1);
  no_direct.c.setZero();
  const RegionThresholds u = region_thresholds(no_direct);
  CHECK_FALSE(u.eps1.has_value());
  CHECK(u.eps2.has_value());
}

TEST_CASE("dual function at expensive prices") {
  const Scenario s = test::random_gains(3, 2, 3);
  const Multipliers lambda(50, 50, 50);
  const DualEvaluation ev = dual_value(s, lambda);
  CHECK(ev.g == Approx(lambda.dot(s.limits())).epsilon(1e-14));
  CHECK(is_valid(ev.assignment, 2));
  CHECK(ev.subgradient == s.limits());
  CHECK(subgradient(s, lambda) == s.limits());
}

TEST_CASE("dual function on a single path") {
  const Scenario s = test::single_path(2, 1.5, 0.3, 1, 2, 2.5);
  const Multipliers lambda(0.1, 0.2, 0.15);
  const PathPowerSolution sol = df_path_power(path_gains(s, 0, 0, 0), lambda);
  const DualEvaluation ev = dual_value(s, lambda);
  CHECK(ev.g == Approx(sol.lagrangian_unit + lambda.dot(s.limits())).epsilon(1e-14));
  CHECK(ev.subgradient(0) == Approx(s.p_s - sol.ps_unit));
  CHECK(ev.subgradient(2) == Approx(s.p_t - sol.ps_unit - sol.pr_unit));
}

TEST_CASE("the assignment value recomposes from the tensor form") {
  const Scenario s = test::random_gains(4, 3, 5);
  const Multipliers lambda(0.1, 0.05, 0.1);
  const ChannelAssignment ca = assign_channels(s, lambda);
  const ProfitTensor t = build_profit_tensor(s, lambda);
  const PhiTensor phi = to_tensor(ca.assignment, 3);
  double v = 0;
  for (int k = 0; k < 3; ++k) v += phi[k].cwiseProduct(t.values[k]).sum();
  CHECK(v == Approx(ca.value).epsilon(1e-12));
  CHECK(from_tensor(phi) == ca.assignment);
}

TEST_CASE("subgradient inequality and weak duality") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.02, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Scenario s = test::random_gains(3, 2, 60 + i);
    const double primal = brute_force_solve(s).primal_value;
    for (int j = 0; j < 20; ++j) {
      const Multipliers l(u(rng), u(rng), u(rng));
      const DualEvaluation ev = dual_value(s, l);
      CHECK(ev.g >= primal - 1e-9);
      const Multipliers m(u(rng), u(rng), u(rng));
      CHECK(dual_value(s, m).g >= ev.g + ev.subgradient.dot(m - l) - 1e-9);
    }
  }
}

TEST_CASE("hybrid step rule") {
  const StepRule r = hybrid_step_rule(10.0, 5.0, 2.0);
  CHECK(r.kind == StepKind::kHybrid);
  CHECK(r.nu == 10.0);
  CHECK(r.floor_length == Approx(1e-3 * 2.0 / 5.0));
  CHECK(r.switch_iteration == static_cast<long>(std::ceil(std::pow(10.0 / r.floor_length, 2))));
}

TEST_CASE("subgradient solve approaches the ellipsoid optimum") {
  const Scenario s = test::random_gains(2, 2, 7);
  const Region region = make_r1(*region_thresholds(s).eps1);
  const Vec3 start = project(Vec3::Constant(0.1), region);
  StepRule rule;
  rule.kind = StepKind::kNonsumSqsum;
  rule.nu = 0.2;
  const DualSolveResult sg = subgradient_solve(s, region, rule, start);
  const DualSolveResult el = ellipsoid_solve(s, region, start, 2 * lambda_max(s));
  CHECK(el.converged);
  CHECK(sg.best_g >= el.best_g - 1e-9 * std::abs(el.best_g));
  CHECK(sg.best_g == Approx(el.best_g).epsilon(1e-3));
  CHECK(region.contains(sg.lambda, 1e-9));
  CHECK(sg.max_theta_norm <= theta_max(s, region));
}

TEST_CASE("subgradient solve stays put at the optimum") {
  const Scenario s = test::random_gains(2, 2, 8);
  const Region region = make_r1(*region_thresholds(s).eps1);
  const DualSolveResult el = ellipsoid_solve(s, region, project(Vec3::Constant(0.1), region),
                                             2 * lambda_max(s));
  StepRule rule;
  rule.kind = StepKind::kConstantLength;
  rule.nu = 1e-9;
  SubgradientOptions opt;
  opt.max_iter = 200;
  const DualSolveResult sg = subgradient_solve(s, region, rule, el.lambda, opt);
  CHECK(sg.best_g == Approx(el.best_g).epsilon(1e-8));
}

TEST_CASE("dcdm without direct links solves only in R2") {
  Scenario s = test::random_gains(3, 2, 9);
  s.c.setZero();
  const SolveResult r = dcdm_solve(s);
  CHECK(r.region_used == RegionKind::kR2);
  CHECK(r.converged);
}

TEST_CASE("dcdm with strong direct links picks R1") {
  Scenario s = test::random_gains(3, 2, 10);
  s.c *= 20.0;
  const SolveResult r = dcdm_solve(s);
  CHECK(r.region_used == RegionKind::kR1);
  CHECK(r.region_consistent);
}

TEST_CASE("dcdm result contract") {
  for (int i = 0; i < 20; ++i) {
    const Scenario s = test::random_gains(2 + i % 2, 2 + (i / 2) % 2, 200 + i);
    const SolveResult r = dcdm_solve(s);
    const SolveResult o = brute_force_solve(s);
    CHECK(r.converged);
    CHECK(is_valid(r.assignment, s.n_users));
    CHECK(is_feasible(s, r.powers));
    CHECK(r.primal_value == Approx(weighted_sum_rate(s, r.assignment, r.powers)).epsilon(1e-12));
    CHECK(r.gap >= -1e-9 * r.dual_value);
    CHECK(r.dual_value >= o.primal_value - 1e-7);
    CHECK(r.primal_value <= o.primal_value * (1 + 1e-6));
    CHECK(r.primal_value == Approx(o.primal_value).epsilon(1e-2));
    CHECK(r.lambda.norm() <= r.lambda_max);
    CHECK(r.max_theta_norm <= r.theta_max);
    CHECK(r.region_consistent);
  }
}

TEST_CASE("primal recovery is feasible and local search never hurts") {
  const Scenario s = test::random_gains(3, 3, 11);
  const SolveResult r = dcdm_solve(s);
  const RecoveredPrimal rec = recover_primal(s, r.lambda);
  CHECK(is_feasible(s, rec.powers));
  CHECK(rec.primal_value <= r.primal_value + 1e-12);
  const RecoveredPrimal better = local_search_primal(s, rec);
  CHECK(better.primal_value >= rec.primal_value);
  CHECK(is_feasible(s, better.powers));
}
