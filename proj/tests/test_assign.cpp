#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "relayopt/assign.hpp"
#include "relayopt/oracle.hpp"
#include "relayopt/power.hpp"

using namespace relayopt;
using doctest::Approx;

TEST_CASE("best user per pair breaks ties to the lowest index") {
  const UserChoice tie = best_user_per_pair((VecX(3) << 0.5, 0.9, 0.9).finished());
  CHECK(tie.user == 1);
  CHECK(tie.value == 0.9);
  const UserChoice one = best_user_per_pair(VecX::Zero(1));
  CHECK(one.user == 0);
  CHECK(one.value == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    const VecX v = VecX::NullaryExpr(5, [&] { return u(rng); });
    int arg = 0;
    for (int k = 1; k < 5; ++k) {
      if (v(k) > v(arg)) arg = k;
    }
    CHECK(best_user_per_pair(v).user == arg);
  }
}

TEST_CASE("hungarian on small matrices") {
  LinearAssignment id = hungarian_max(MatX::Identity(2, 2));
  CHECK(id.permutation == std::vector<int>{0, 1});
  CHECK(id.total == 2.0);

  const LinearAssignment cross = hungarian_max((MatX(2, 2) << 1, 2, 3, 1).finished());
  CHECK(cross.permutation == std::vector<int>{1, 0});
  CHECK(cross.total == 5.0);
}

TEST_CASE("hungarian matches enumeration on 6x6") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 3);
  const auto perms = test::permutations(6);
  for (int trial = 0; trial < 25; ++trial) {
    const MatX p = MatX::NullaryExpr(6, 6, [&] { return u(rng); });
    double best = -1e300;
    for (const auto& perm : perms) {
      double v = 0;
      for (int m = 0; m < 6; ++m) v += p(m, perm[m]);
      best = std::max(best, v);
    }
    const LinearAssignment h = hungarian_max(p);
    double v = 0;
    for (int m = 0; m < 6; ++m) v += p(m, h.permutation[m]);
    CHECK(v == Approx(h.total).epsilon(1e-12));
    CHECK(h.total == Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("single user and single channel") {
  const Multipliers lambda(0.3, 0.2, 0.1);
  const Scenario k1 = test::random_gains(4, 1, 2);
  const ChannelAssignment a = assign_channels(k1, lambda);
  CHECK(a.assignment.user_of_pair == std::vector<int>(4, 0));

  const Scenario n1 = test::random_gains(1, 3, 3);
  const ChannelAssignment b = assign_channels(n1, lambda);
  CHECK(b.assignment.pairing == std::vector<int>{0});
  const ProfitTensor t = build_profit_tensor(n1, lambda);
  int arg = 0;
  for (int k = 1; k < 3; ++k) {
    if (t.values[k](0, 0) > t.values[arg](0, 0)) arg = k;
  }
  CHECK(b.assignment.user_of_pair[0] == arg);
}

TEST_CASE("profit tensor is consistent with path profits") {
  const Scenario s = test::random_gains(3, 2, 9);
  const Multipliers lambda(0.2, 0.4, 0.1);
  const ProfitTensor t = build_profit_tensor(s, lambda);
  for (int m = 0; m < 3; ++m) {
    for (int n = 0; n < 3; ++n) {
      for (int k = 0; k < 2; ++k) {
        CHECK(t.values[k](m, n) == path_profit(path_gains(s, m, n, k), lambda, s.strategy));
      }
      CHECK(t.reduced(m, n) == std::max(t.values[0](m, n), t.values[1](m, n)));
    }
  }
}

TEST_CASE("assignment matches enumeration of all 48 assignments") {
  for (int i = 0; i < 20; ++i) {
    const Scenario s = test::random_gains(3, 2, 40 + i);
    const Multipliers lambda(0.05 * (i + 1), 0.1, 0.02 * i);
    const ProfitTensor t = build_profit_tensor(s, lambda);
    double best = -1;
    for (const Assignment& a : enumerate_assignments(3, 2)) {
      double v = 0;
      for (int m = 0; m < 3; ++m) v += t.values[a.user_of_pair[m]](m, a.pairing[m]);
      best = std::max(best, v);
    }
    const ChannelAssignment ca = assign_channels(s, lambda);
    CHECK(ca.value == Approx(best).epsilon(1e-12));
    CHECK(is_valid(ca.assignment, 2));
  }
}

TEST_CASE("identity pairing policy keeps m paired with m") {
  const Scenario s = test::random_gains(4, 3, 10);
  const ChannelAssignment ca = assign_channels(s, Multipliers(0.1, 0.1, 0.1), PairingPolicy::kIdentity);
  CHECK(ca.assignment.pairing == std::vector<int>{0, 1, 2, 3});
}
