#include "relayopt/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "relayopt/assign.hpp"
#include "relayopt/power.hpp"
#include "relayopt/rates.hpp"

namespace relayopt {

namespace {

SolveResult finish(const Scenario& s, Assignment assignment, PowerAllocation powers,
                   int iterations = 0) {
  SolveResult r;
  r.assignment = std::move(assignment);
  r.powers = std::move(powers);
  r.per_path_rates = path_rates(s, r.assignment, r.powers);
  r.primal_value = weighted_sum_rate(s, r.assignment, r.powers);
  r.iterations = iterations;
  return r;
}

std::vector<int> strongest_relay_user(const Scenario& s) {
  std::vector<int> user(s.n_channels);
  for (int n = 0; n < s.n_channels; ++n) {
    user[n] = best_user_per_pair(s.b.row(n).transpose()).user;
  }
  return user;
}

}  // namespace

PowerAllocation uniform_powers(const Scenario& s) {
  const int N = s.n_channels;
  const double share = s.p_t / (s.p_s + s.p_r);
  const double ps = std::min(s.p_s, share * s.p_s) / N;
  const double pr = std::min(s.p_r, share * s.p_r) / N;
  return {VecX::Constant(N, ps), VecX::Constant(N, pr)};
}

SolveResult no_pairing_solve(const Scenario& scenario, const DcdmOptions& options) {
  DcdmOptions o = options;
  o.policy = PairingPolicy::kIdentity;
  return dcdm_solve(scenario, o);
}

SolveResult no_pa_solve(const Scenario& s) {
  require_valid(s);
  const int N = s.n_channels;
  const PowerAllocation p = uniform_powers(s);
  const double ps = p.ps(0);
  const double pr = p.pr(0);
  ProfitTensor t;
  t.values.assign(s.n_users, MatX::Zero(N, N));
  t.reduced.resize(N, N);
  t.best_user.resize(N, N);
  VecX slice(s.n_users);
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < s.n_users; ++k) {
        slice(k) = s.w(k) * path_rate(s.strategy, s.a(m), s.b(n, k), s.c(m, k), ps, pr);
        t.values[k](m, n) = slice(k);
      }
      const UserChoice best = best_user_per_pair(slice);
      t.reduced(m, n) = best.value;
      t.best_user(m, n) = best.user;
    }
  }
  return finish(s, assign_from_profits(t).assignment, p);
}

SolveResult separate_opt_solve(const Scenario& s) {
  require_valid(s);
  const int N = s.n_channels;
  const std::vector<int> user = strongest_relay_user(s);

  std::vector<int> first(N), second(N);
  std::iota(first.begin(), first.end(), 0);
  std::iota(second.begin(), second.end(), 0);
  std::stable_sort(first.begin(), first.end(), [&](int i, int j) { return s.a(i) > s.a(j); });
  std::stable_sort(second.begin(), second.end(),
                   [&](int i, int j) { return s.b(i, user[i]) > s.b(j, user[j]); });

  Assignment asg;
  asg.pairing.resize(N);
  asg.user_of_pair.resize(N);
  for (int r = 0; r < N; ++r) {
    asg.pairing[first[r]] = second[r];
    asg.user_of_pair[first[r]] = user[second[r]];
  }
  FixedPowerResult fixed = allocate_power(s, asg);
  return finish(s, std::move(asg), std::move(fixed.powers));
}

SolveResult max_gain_solve(const Scenario& s) {
  require_valid(s);
  Assignment asg = identity_assignment(s.n_channels);
  asg.user_of_pair = strongest_relay_user(s);
  return finish(s, std::move(asg), uniform_powers(s));
}

bool is_scheme(std::string_view id) {
  return std::find(std::begin(kSchemeIds), std::end(kSchemeIds), id) != std::end(kSchemeIds);
}

SolveResult solve_scheme(std::string_view id, const Scenario& s, const DcdmOptions& options) {
  if (id == "joint") return dcdm_solve(s, options);
  if (id == "no_pairing") return no_pairing_solve(s, options);
  if (id == "no_pa") return no_pa_solve(s);
  if (id == "separate") return separate_opt_solve(s);
  if (id == "max_gain") return max_gain_solve(s);
  throw Error("unknown scheme: " + std::string(id));
}

}  // namespace relayopt
