#include "relayopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relayopt {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kDF:
      return "DF";
    case Strategy::kAF:
      return "AF";
    case Strategy::kAFUpper:
      return "AF_UPPER";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "DF") return Strategy::kDF;
  if (name == "AF") return Strategy::kAF;
  if (name == "AF_UPPER") return Strategy::kAFUpper;
  throw Error("unknown strategy: " + std::string(name));
}

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kR1:
      return "R1";
    case RegionKind::kR2:
      return "R2";
    case RegionKind::kNonneg:
      return "NONNEG";
    case RegionKind::kNone:
      return "none";
  }
  return "?";
}

Scenario Scenario::without_direct_links() const {
  Scenario copy = *this;
  copy.c.setZero();
  return copy;
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> errors;
  const auto N = s.n_channels;
  const auto K = s.n_users;
  if (N <= 0) errors.emplace_back("n_channels must be positive");
  if (K <= 0) errors.emplace_back("n_users must be positive");
  if (!errors.empty()) return errors;

  auto shape_error = [&](const char* name, Index rows, Index cols, Index want_rows,
                         Index want_cols) {
    if (rows != want_rows || cols != want_cols) {
      std::ostringstream os;
      os << name << " has shape " << rows << "x" << cols << ", expected " << want_rows << "x"
         << want_cols;
      errors.push_back(os.str());
      return true;
    }
    return false;
  };
  bool bad_shape = false;
  bad_shape |= shape_error("a", s.a.rows(), s.a.cols(), N, 1);
  bad_shape |= shape_error("b", s.b.rows(), s.b.cols(), N, K);
  bad_shape |= shape_error("c", s.c.rows(), s.c.cols(), N, K);
  bad_shape |= shape_error("w", s.w.rows(), s.w.cols(), K, 1);

  auto all_finite = [](const auto& m) { return m.allFinite(); };
  if (!bad_shape) {
    if (!all_finite(s.a) || !all_finite(s.b) || !all_finite(s.c) || !all_finite(s.w)) {
      errors.emplace_back("non-finite gain or weight");
    }
    if ((s.a.array() < 0).any() || (s.b.array() < 0).any() || (s.c.array() < 0).any()) {
      errors.emplace_back("negative gain");
    }
    if ((s.w.array() < 0).any()) errors.emplace_back("negative weight");
  }
  if (!(s.p_s > 0) || !(s.p_r > 0) || !(s.p_t > 0) || !std::isfinite(s.p_s) ||
      !std::isfinite(s.p_r) || !std::isfinite(s.p_t)) {
    errors.emplace_back("non-positive power limit");
  }
  if (bad_shape || !errors.empty()) return errors;

  bool has_path = false;
  for (int m = 0; m < N && !has_path; ++m) {
    if (s.a(m) <= 0) continue;
    for (int n = 0; n < N && !has_path; ++n) {
      for (int k = 0; k < K; ++k) {
        if (s.w(k) > 0 && s.b(n, k) + s.c(m, k) > 0) {
          has_path = true;
          break;
        }
      }
    }
  }
  if (!has_path) errors.emplace_back("degenerate instance: no path with positive rate");
  return errors;
}

void require_valid(const Scenario& scenario) {
  const auto errors = validate(scenario);
  if (errors.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& e : errors) msg += " " + e + ";";
  throw InvalidScenario(msg);
}

Assignment identity_assignment(int n_channels) {
  Assignment out;
  out.pairing.resize(n_channels);
  for (int m = 0; m < n_channels; ++m) out.pairing[m] = m;
  out.user_of_pair.assign(n_channels, 0);
  return out;
}

bool is_valid(const Assignment& assignment, int n_users) {
  const int N = assignment.size();
  if (static_cast<int>(assignment.user_of_pair.size()) != N) return false;
  std::vector<bool> used(N, false);
  for (int m = 0; m < N; ++m) {
    const int n = assignment.pairing[m];
    if (n < 0 || n >= N || used[n]) return false;
    used[n] = true;
    const int k = assignment.user_of_pair[m];
    if (k < 0 || k >= n_users) return false;
  }
  return true;
}

PhiTensor to_tensor(const Assignment& assignment, int n_users) {
  const int N = assignment.size();
  PhiTensor phi(n_users, MatX::Zero(N, N));
  for (int m = 0; m < N; ++m) {
    phi[assignment.user_of_pair[m]](m, assignment.pairing[m]) = 1.0;
  }
  return phi;
}

bool satisfies_pairing_constraints(const PhiTensor& phi, double tol) {
  if (phi.empty()) return false;
  const Index N = phi.front().rows();
  MatX x = MatX::Zero(N, N);
  for (const auto& slice : phi) {
    if (slice.rows() != N || slice.cols() != N) return false;
    if ((slice.array() < -tol).any() || (slice.array() > 1 + tol).any()) return false;
    x += slice;
  }
  return ((x.rowwise().sum().array() - 1.0).abs() <= tol).all() &&
         ((x.colwise().sum().array() - 1.0).abs() <= tol).all();
}

Assignment from_tensor(const PhiTensor& phi) {
  if (!satisfies_pairing_constraints(phi)) throw Error("tensor violates pairing constraints");
  const Index N = phi.front().rows();
  Assignment out;
  out.pairing.assign(N, -1);
  out.user_of_pair.assign(N, -1);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    for (Index m = 0; m < N; ++m) {
      for (Index n = 0; n < N; ++n) {
        const double v = phi[k](m, n);
        if (v != 0.0 && v != 1.0) throw Error("tensor is not binary");
        if (v == 1.0) {
          out.pairing[m] = static_cast<int>(n);
          out.user_of_pair[m] = static_cast<int>(k);
        }
      }
    }
  }
  return out;
}

PowerAllocation PowerAllocation::zeros(int n_channels) {
  return {VecX::Zero(n_channels), VecX::Zero(n_channels)};
}

Vec3 PowerAllocation::usage() const {
  const double s = ps.sum();
  const double r = pr.sum();
  return {s, r, s + r};
}

bool is_feasible(const Scenario& scenario, const PowerAllocation& powers, double rel_tol) {
  if ((powers.ps.array() < 0).any() || (powers.pr.array() < 0).any()) return false;
  const Vec3 used = powers.usage();
  const Vec3 limit = scenario.limits();
  return ((used.array() - limit.array()) <= rel_tol * limit.array()).all();
}

double feasibility_scale(const Scenario& scenario, const PowerAllocation& powers) {
  const Vec3 used = powers.usage();
  const Vec3 limit = scenario.limits();
  double scale = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (used(i) > limit(i)) scale = std::min(scale, limit(i) / used(i));
  }
  return scale;
}

}  // namespace relayopt
