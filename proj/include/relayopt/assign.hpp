#pragma once

#include <vector>

#include <Eigen/Core>

#include "relayopt/model.hpp"

namespace relayopt {

struct UserChoice {
  int user = 0;
  double value = 0.0;
};

// Argmax over a length-K profit slice; ties go to the smallest index.
UserChoice best_user_per_pair(const Eigen::Ref<const VecX>& profits);

struct LinearAssignment {
  std::vector<int> permutation;  // row m -> column permutation[m]
  double total = 0.0;
};

/// Maximum-weight perfect matching on a square matrix (Hungarian method with
/// potentials, O(N^3)).
LinearAssignment hungarian_max(const MatX& profit);

/// A_mnk for every path at fixed multipliers, reduced over users.
struct ProfitTensor {
  std::vector<MatX> values;  // values[k](m, n)
  MatX reduced;              // max_k values[k](m, n)
  Eigen::MatrixXi best_user;
};

ProfitTensor build_profit_tensor(const Scenario& scenario, const Multipliers& lambda);

// How the first-hop/second-hop matching is chosen.
enum class PairingPolicy { kOptimal, kIdentity };

struct ChannelAssignment {
  Assignment assignment;
  double value = 0.0;  // sum over m of reduced(m, pairing[m])
};

ChannelAssignment assign_from_profits(const ProfitTensor& profits,
                                      PairingPolicy policy = PairingPolicy::kOptimal);

ChannelAssignment assign_channels(const Scenario& scenario, const Multipliers& lambda,
                                  PairingPolicy policy = PairingPolicy::kOptimal);

}  // namespace relayopt
