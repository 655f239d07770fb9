#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace relayopt {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecX = VectorX<double>;
using MatX = MatrixX<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Water-filling constant: derivative of (1/2)log2(1+x) is 1/(alpha*(1+x)).
inline constexpr double kAlpha = 2.0 * std::numbers::ln2;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

// Raised when a per-path Lagrangian has no finite maximizer at the given prices.
class UnboundedSubproblem : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace relayopt
