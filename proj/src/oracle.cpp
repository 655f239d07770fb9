#include "relayopt/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "relayopt/rates.hpp"

namespace relayopt {

std::uint64_t assignment_count(int n_channels, int n_users) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  auto mul = [&](std::uint64_t f) {
    if (f != 0 && count > kMax / f) {
      count = kMax;
      return false;
    }
    count *= f;
    return true;
  };
  for (int i = 2; i <= n_channels; ++i) {
    if (!mul(static_cast<std::uint64_t>(i))) return kMax;
  }
  for (int i = 0; i < n_channels; ++i) {
    if (!mul(static_cast<std::uint64_t>(n_users))) return kMax;
  }
  return count;
}

void for_each_assignment(int N, int K, std::uint64_t budget,
                         const std::function<void(const Assignment&)>& visit) {
  const std::uint64_t count = assignment_count(N, K);
  if (count > budget) {
    throw BudgetExceeded("enumeration of " + std::to_string(N) + "!*" + std::to_string(K) + "^" +
                         std::to_string(N) + " assignments exceeds budget " +
                         std::to_string(budget));
  }
  Assignment a;
  a.pairing.resize(N);
  std::iota(a.pairing.begin(), a.pairing.end(), 0);
  do {
    a.user_of_pair.assign(N, 0);
    while (true) {
      visit(a);
      int pos = N - 1;
      while (pos >= 0 && a.user_of_pair[pos] == K - 1) a.user_of_pair[pos--] = 0;
      if (pos < 0) break;
      ++a.user_of_pair[pos];
    }
  } while (std::next_permutation(a.pairing.begin(), a.pairing.end()));
}

std::vector<Assignment> enumerate_assignments(int N, int K, std::uint64_t budget) {
  std::vector<Assignment> out;
  for_each_assignment(N, K, budget, [&](const Assignment& a) { out.push_back(a); });
  return out;
}

namespace {

struct OraclePath {
  int channel;
  double w, a, b, c;
};

// Log-barrier objective for
//   max sum_j w_j t_j  s.t.  t_j <= rate pieces of path j, powers >= 0, limits.
class Barrier {
 public:
  Barrier(const Scenario& s, std::vector<OraclePath> paths)
      : s_(s), paths_(std::move(paths)), n_(3 * static_cast<int>(paths_.size())) {}

  int dim() const { return n_; }

  int constraint_count() const {
    const int pieces = s_.strategy == Strategy::kDF ? 2 : 1;
    return static_cast<int>(paths_.size()) * (pieces + 2) + 3;
  }

  // Returns false when x is outside the barrier's domain.
  bool eval(const VecX& x, double tau, double& phi, VecX* grad, MatX* hess) const {
    phi = 0.0;
    if (grad) grad->setZero(n_);
    if (hess) hess->setZero(n_, n_);

    auto add_log = [&](double v, const auto& idx, const auto& g, const auto& h) {
      if (!(v > 0)) return false;
      phi += std::log(v);
      const int k = static_cast<int>(idx.size());
      for (int i = 0; i < k; ++i) {
        if (grad) (*grad)(idx[i]) += g(i) / v;
        if (hess) {
          for (int j = 0; j < k; ++j) {
            (*hess)(idx[i], idx[j]) += h(i, j) / v - g(i) * g(j) / (v * v);
          }
        }
      }
      return true;
    };

    double sum_s = 0.0, sum_r = 0.0;
    for (std::size_t j = 0; j < paths_.size(); ++j) {
      const OraclePath& p = paths_[j];
      const int is = 3 * j, ir = is + 1, it = is + 2;
      const double ps = x(is), pr = x(ir), t = x(it);
      sum_s += ps;
      sum_r += pr;
      phi += tau * p.w * t;
      if (grad) (*grad)(it) += tau * p.w;

      const std::array<int, 3> idx{is, ir, it};
      const std::array<int, 1> one_s{is};
      const std::array<int, 1> one_r{ir};
      const Eigen::Matrix<double, 1, 1> unit = Eigen::Matrix<double, 1, 1>::Ones();
      const Eigen::Matrix<double, 1, 1> flat = Eigen::Matrix<double, 1, 1>::Zero();
      if (!add_log(ps, one_s, unit, flat) || !add_log(pr, one_r, unit, flat)) return false;

      auto add_piece = [&](double f, const Eigen::Vector2d& df, const Eigen::Matrix2d& d2f) {
        Vec3 g(df(0), df(1), -1.0);
        Mat3 h = Mat3::Zero();
        h.topLeftCorner<2, 2>() = d2f;
        return add_log(f - t, idx, g, h);
      };
      // ln(1 + u . (ps, pr)) / alpha, with u a constant gain pair.
      auto log_linear = [&](double gs, double gr) {
        const double u = 1.0 + gs * ps + gr * pr;
        const Eigen::Vector2d v(gs, gr);
        return add_piece(std::log(u) / kAlpha, v / (kAlpha * u),
                         -v * v.transpose() / (kAlpha * u * u));
      };

      if (s_.strategy == Strategy::kDF) {
        if (!log_linear(p.a, 0.0) || !log_linear(p.c, p.b)) return false;
      } else {
        const double D = p.a * ps + p.b * pr;
        const double ab = p.a * p.b;
        double h = p.c * ps;
        Eigen::Vector2d dh(p.c, 0.0);
        Eigen::Matrix2d d2h = Eigen::Matrix2d::Zero();
        if (ab > 0 && D > 0) {
          h += ab * ps * pr / D;
          dh(0) += p.a * p.b * p.b * pr * pr / (D * D);
          dh(1) += p.a * p.a * p.b * ps * ps / (D * D);
          const double k2 = 2 * ab * ab / (D * D * D);
          d2h(0, 0) = -k2 * pr * pr;
          d2h(1, 1) = -k2 * ps * ps;
          d2h(0, 1) = d2h(1, 0) = k2 * ps * pr;
        }
        const double u = 1.0 + h;
        if (!add_piece(std::log(u) / kAlpha, dh / (kAlpha * u),
                       (d2h / u - dh * dh.transpose() / (u * u)) / kAlpha)) {
          return false;
        }
      }
    }

    // Power limits: linear, so only the gradient term enters the Hessian.
    auto add_limit = [&](double slack, double ws, double wr) {
      if (!(slack > 0)) return false;
      phi += std::log(slack);
      for (std::size_t j = 0; j < paths_.size(); ++j) {
        const int is = 3 * j, ir = is + 1;
        if (grad) {
          (*grad)(is) -= ws / slack;
          (*grad)(ir) -= wr / slack;
        }
        if (hess) {
          for (std::size_t i = 0; i < paths_.size(); ++i) {
            const int js = 3 * i, jr = js + 1;
            const double q = 1.0 / (slack * slack);
            (*hess)(is, js) -= ws * ws * q;
            (*hess)(is, jr) -= ws * wr * q;
            (*hess)(ir, js) -= wr * ws * q;
            (*hess)(ir, jr) -= wr * wr * q;
          }
        }
      }
      return true;
    };
    return add_limit(s_.p_s - sum_s, 1, 0) && add_limit(s_.p_r - sum_r, 0, 1) &&
           add_limit(s_.p_t - sum_s - sum_r, 1, 1);
  }

 private:
  const Scenario& s_;
  std::vector<OraclePath> paths_;
  int n_;
};

}  // namespace

OracleAllocation fixed_assignment_power_opt(const Scenario& s, const Assignment& asg) {
  const int N = asg.size();
  std::vector<OraclePath> paths;
  for (int m = 0; m < N; ++m) {
    const int n = asg.pairing[m];
    const int k = asg.user_of_pair[m];
    OraclePath p{m, s.w(k), s.a(m), s.b(n, k), s.c(m, k)};
    const bool carries = s.strategy == Strategy::kDF
                             ? p.a > 0 && p.b + p.c > 0
                             : p.c > 0 || (p.a > 0 && p.b > 0);
    if (p.w > 0 && carries) paths.push_back(p);
  }

  OracleAllocation out;
  out.powers = PowerAllocation::zeros(N);
  if (paths.empty()) return out;

  const Barrier barrier(s, paths);
  const int dim = barrier.dim();
  VecX x(dim);
  const double p0 = 0.25 * std::min({s.p_s, s.p_r, s.p_t / 2}) / N;
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const OraclePath& p = paths[j];
    const double f = s.strategy == Strategy::kDF ? df_rate(p.a, p.b, p.c, p0, p0)
                                                 : af_rate_upper(p.a, p.b, p.c, p0, p0);
    x(3 * j) = p0;
    x(3 * j + 1) = p0;
    x(3 * j + 2) = f - 1.0;
  }

  const double m = barrier.constraint_count();
  double tau = 1.0;
  VecX grad(dim);
  MatX hess(dim, dim);
  while (true) {
    for (int it = 0; it < 200; ++it) {
      double phi = 0.0;
      barrier.eval(x, tau, phi, &grad, &hess);
      const Eigen::LDLT<MatX> ldlt(-hess);
      const VecX step = ldlt.solve(grad);
      const double dec = grad.dot(step);
      if (!(dec > 2e-12)) break;
      double t = 1.0;
      bool moved = false;
      while (t > 1e-16) {
        const VecX trial = x + t * step;
        double trial_phi = 0.0;
        if (barrier.eval(trial, tau, trial_phi, nullptr, nullptr) &&
            trial_phi >= phi + 0.25 * t * dec) {
          x = trial;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) {
        if (dec > 1e-6) out.converged = false;
        break;
      }
    }
    if (m / tau <= 1e-10) break;
    tau *= 10.0;
  }

  for (std::size_t j = 0; j < paths.size(); ++j) {
    out.powers.ps(paths[j].channel) = x(3 * j);
    out.powers.pr(paths[j].channel) = x(3 * j + 1);
  }
  out.value = weighted_sum_rate(s, asg, out.powers);
  return out;
}

SolveResult brute_force_solve(const Scenario& s, std::uint64_t budget) {
  require_valid(s);
  SolveResult best;
  best.primal_value = -1.0;
  int visited = 0;
  for_each_assignment(s.n_channels, s.n_users, budget, [&](const Assignment& a) {
    ++visited;
    OracleAllocation alloc = fixed_assignment_power_opt(s, a);
    // Values within the barrier's accuracy count as ties; the first one wins.
    if (alloc.value > best.primal_value + 1e-9 * std::abs(best.primal_value)) {
      best.assignment = a;
      best.powers = std::move(alloc.powers);
      best.primal_value = alloc.value;
      best.converged = alloc.converged;
    }
  });
  best.iterations = visited;
  best.per_path_rates = path_rates(s, best.assignment, best.powers);
  best.dual_value = best.primal_value;
  best.gap = 0.0;
  best.region_used = RegionKind::kNone;
  best.note = "exhaustive";
  return best;
}

}  // namespace relayopt
