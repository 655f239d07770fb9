#include "relayopt/assign.hpp"

#include <limits>

#include "relayopt/power.hpp"

namespace relayopt {

UserChoice best_user_per_pair(const Eigen::Ref<const VecX>& profits) {
  UserChoice best{0, profits(0)};
  for (Index k = 1; k < profits.size(); ++k) {
    if (profits(k) > best.value) best = {static_cast<int>(k), profits(k)};
  }
  return best;
}

LinearAssignment hungarian_max(const MatX& profit) {
  const int n = static_cast<int>(profit.rows());
  LinearAssignment out;
  out.permutation.assign(n, -1);
  if (n == 0) return out;

  // Shortest augmenting paths on cost = -profit; arrays are 1-based with
  // column 0 as the virtual source.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -profit(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= n; ++j) out.permutation[p[j] - 1] = j - 1;
  for (int m = 0; m < n; ++m) out.total += profit(m, out.permutation[m]);
  return out;
}

ProfitTensor build_profit_tensor(const Scenario& s, const Multipliers& lambda) {
  const int N = s.n_channels;
  const int K = s.n_users;
  ProfitTensor t;
  t.values.assign(K, MatX::Zero(N, N));
  t.reduced.resize(N, N);
  t.best_user.resize(N, N);
  VecX slice(K);
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < K; ++k) {
        slice(k) = path_profit(path_gains(s, m, n, k), lambda, s.strategy);
        t.values[k](m, n) = slice(k);
      }
      const UserChoice best = best_user_per_pair(slice);
      t.reduced(m, n) = best.value;
      t.best_user(m, n) = best.user;
    }
  }
  return t;
}

ChannelAssignment assign_from_profits(const ProfitTensor& t, PairingPolicy policy) {
  const int N = static_cast<int>(t.reduced.rows());
  ChannelAssignment out;
  if (policy == PairingPolicy::kIdentity) {
    out.assignment = identity_assignment(N);
  } else {
    out.assignment.pairing = hungarian_max(t.reduced).permutation;
  }
  out.assignment.user_of_pair.resize(N);
  for (int m = 0; m < N; ++m) {
    const int n = out.assignment.pairing[m];
    out.assignment.user_of_pair[m] = t.best_user(m, n);
    out.value += t.reduced(m, n);
  }
  return out;
}

ChannelAssignment assign_channels(const Scenario& scenario, const Multipliers& lambda,
                                  PairingPolicy policy) {
  return assign_from_profits(build_profit_tensor(scenario, lambda), policy);
}

}  // namespace relayopt
