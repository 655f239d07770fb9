#include "relayopt/rates.hpp"

namespace relayopt {

double path_rate(Strategy strategy, double a, double b, double c, double ps, double pr) {
  switch (strategy) {
    case Strategy::kDF:
      return df_rate(a, b, c, ps, pr);
    case Strategy::kAF:
      return af_rate(a, b, c, ps, pr);
    case Strategy::kAFUpper:
      return af_rate_upper(a, b, c, ps, pr);
  }
  return 0.0;
}

double optimized_path_rate(Strategy strategy, double a, double b, double c, double ps,
                           double pr) {
  if (strategy == Strategy::kDF) return df_rate(a, b, c, ps, pr);
  return af_rate_upper(a, b, c, ps, pr);
}

namespace {

template <typename RateFn>
VecX rates_with(const Scenario& s, const Assignment& asg, const PowerAllocation& p,
                RateFn&& rate) {
  const int N = asg.size();
  VecX out(N);
  for (int m = 0; m < N; ++m) {
    const int n = asg.pairing[m];
    const int k = asg.user_of_pair[m];
    out(m) = rate(s.a(m), s.b(n, k), s.c(m, k), p.ps(m), p.pr(m));
  }
  return out;
}

double weighted(const Scenario& s, const Assignment& asg, const VecX& rates) {
  double total = 0.0;
  for (int m = 0; m < asg.size(); ++m) total += s.w(asg.user_of_pair[m]) * rates(m);
  return total;
}

}  // namespace

VecX path_rates(const Scenario& scenario, const Assignment& assignment,
                const PowerAllocation& powers) {
  return rates_with(scenario, assignment, powers,
                    [&](double a, double b, double c, double ps, double pr) {
                      return path_rate(scenario.strategy, a, b, c, ps, pr);
                    });
}

double weighted_sum_rate(const Scenario& scenario, const Assignment& assignment,
                         const PowerAllocation& powers) {
  return weighted(scenario, assignment, path_rates(scenario, assignment, powers));
}

double optimized_weighted_sum_rate(const Scenario& scenario, const Assignment& assignment,
                                   const PowerAllocation& powers) {
  const VecX rates = rates_with(scenario, assignment, powers,
                                [&](double a, double b, double c, double ps, double pr) {
                                  return optimized_path_rate(scenario.strategy, a, b, c, ps, pr);
                                });
  return weighted(scenario, assignment, rates);
}

}  // namespace relayopt
