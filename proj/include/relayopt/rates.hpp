#pragma once

#include <algorithm>
#include <cmath>

#include "relayopt/model.hpp"

namespace relayopt {

namespace detail {
template <typename Scalar>
Scalar half_log2_1p(Scalar x) {
  using std::log1p;
  return log1p(x) / Scalar(2 * std::numbers::ln2);
}
}  // namespace detail

// Rates are in bits per channel use of the two-slot frame, i.e. the 1/2
// repetition factor is already applied.

/// Repetition-coded decode-and-forward rate with maximum-ratio combining of the
/// direct link: the relay must decode (first term) and the user combines both
/// slots (second term).
template <typename Scalar>
Scalar df_rate(Scalar a, Scalar b, Scalar c, Scalar ps, Scalar pr) {
  using std::min;
  return min(detail::half_log2_1p(a * ps), detail::half_log2_1p(c * ps + b * pr));
}

/// Exact amplify-and-forward rate. Not concave in (ps, pr).
template <typename Scalar>
Scalar af_rate(Scalar a, Scalar b, Scalar c, Scalar ps, Scalar pr) {
  const Scalar relayed = a * b * ps * pr / (Scalar(1) + a * ps + b * pr);
  return detail::half_log2_1p(relayed + c * ps);
}

/// Concave upper bound of af_rate obtained by dropping the 1 in the relayed
/// SNR denominator. Continuously extended by 0 where a*ps + b*pr == 0.
template <typename Scalar>
Scalar af_rate_upper(Scalar a, Scalar b, Scalar c, Scalar ps, Scalar pr) {
  const Scalar den = a * ps + b * pr;
  const Scalar relayed = den > Scalar(0) ? a * b * ps * pr / den : Scalar(0);
  return detail::half_log2_1p(relayed + c * ps);
}

// Rate the strategy reports (AF uses the exact expression).
double path_rate(Strategy strategy, double a, double b, double c, double ps, double pr);

// Rate the strategy optimizes (AF is replaced by its concave bound).
double optimized_path_rate(Strategy strategy, double a, double b, double c, double ps,
                           double pr);

// Per-path rates R(m, pairing[m], user_of_pair[m]) under scenario.strategy.
VecX path_rates(const Scenario& scenario, const Assignment& assignment,
                const PowerAllocation& powers);

double weighted_sum_rate(const Scenario& scenario, const Assignment& assignment,
                         const PowerAllocation& powers);

// Same objective with the AF rate replaced by its concave bound.
double optimized_weighted_sum_rate(const Scenario& scenario, const Assignment& assignment,
                                   const PowerAllocation& powers);

}  // namespace relayopt
