#include "relayopt/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "relayopt/baselines.hpp"

namespace relayopt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double clamp_distance(double d, double d_min) { return std::max(d, d_min); }

// Per-subcarrier power response of one link.
VecX link_response(int n_channels, int n_taps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / n_taps));
  std::vector<std::complex<double>> taps(n_taps);
  for (auto& t : taps) {
    const double re = normal(rng);
    const double im = normal(rng);
    t = {re, im};
  }
  VecX out(n_channels);
  for (int n = 0; n < n_channels; ++n) {
    std::complex<double> h = 0.0;
    for (int l = 0; l < n_taps; ++l) {
      h += taps[l] * std::polar(1.0, -2.0 * std::numbers::pi * l * n / n_channels);
    }
    out(n) = std::norm(h);
  }
  return out;
}

enum LinkKind : std::uint64_t { kSourceRelay = 0, kRelayUser = 1, kSourceUser = 2 };

std::uint64_t link_id(LinkKind kind, int user) {
  return (static_cast<std::uint64_t>(kind) << 32) | static_cast<std::uint64_t>(user);
}

}  // namespace

VecX Geometry::relay_user_distances() const {
  VecX out(users.size());
  for (std::size_t k = 0; k < users.size(); ++k) {
    out(k) = clamp_distance((users[k] - Eigen::Vector2d(d_sr, 0)).norm(), d_min);
  }
  return out;
}

VecX Geometry::source_user_distances() const {
  VecX out(users.size());
  for (std::size_t k = 0; k < users.size(); ++k) out(k) = clamp_distance(users[k].norm(), d_min);
  return out;
}

double Geometry::source_relay_distance() const { return clamp_distance(d_sr, d_min); }

double Geometry::mean_source_user_distance() const { return source_user_distances().mean(); }

Geometry arc_geometry(double d_sr, double d_rd, int n_users, double kappa, double sigma2) {
  Geometry g;
  g.d_sr = d_sr;
  g.kappa = kappa;
  g.sigma2 = sigma2;
  for (int k = 0; k < n_users; ++k) {
    const double angle = std::numbers::pi * (-0.5 + (k + 0.5) / n_users);
    g.users.emplace_back(d_sr + d_rd * std::cos(angle), d_rd * std::sin(angle));
  }
  return g;
}

Geometry cluster_geometry(double d_sr, double d_sd, int n_users, double radius, double kappa,
                          double sigma2) {
  Geometry g;
  g.d_sr = d_sr;
  g.kappa = kappa;
  g.sigma2 = sigma2;
  for (int k = 0; k < n_users; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n_users;
    g.users.emplace_back(d_sd + radius * std::cos(angle), radius * std::sin(angle));
  }
  return g;
}

std::uint64_t link_seed(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t link) {
  return splitmix64(splitmix64(splitmix64(master_seed) ^ trial) ^ link);
}

ChannelGains generate_channels(const Geometry& geo, int n_channels, int n_taps,
                               std::uint64_t master_seed, std::uint64_t trial) {
  const int K = static_cast<int>(geo.users.size());
  const VecX d_rd = geo.relay_user_distances();
  const VecX d_sd = geo.source_user_distances();
  auto response = [&](LinkKind kind, int user, double distance) {
    const VecX h = link_response(n_channels, n_taps,
                                 link_seed(master_seed, trial, link_id(kind, user)));
    return VecX(h * std::pow(distance, -geo.kappa) / geo.sigma2);
  };
  ChannelGains out;
  out.a = response(kSourceRelay, 0, geo.source_relay_distance());
  out.b.resize(n_channels, K);
  out.c.resize(n_channels, K);
  for (int k = 0; k < K; ++k) {
    out.b.col(k) = response(kRelayUser, k, d_rd(k));
    out.c.col(k) = response(kSourceUser, k, d_sd(k));
  }
  return out;
}

double pt_from_nominal_snr(double snr_linear, const Geometry& geo, int n_channels) {
  return snr_linear * 2.0 * geo.sigma2 * n_channels *
         std::pow(geo.mean_source_user_distance(), geo.kappa);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string_view to_string(PowerSplit split) {
  switch (split) {
    case PowerSplit::kTotalOnly:
      return "total_only";
    case PowerSplit::kIndividualOnly:
      return "individual_only";
    case PowerSplit::kBoth:
      return "both";
  }
  return "?";
}

PowerSplit power_split_from_string(std::string_view name) {
  if (name == "total_only") return PowerSplit::kTotalOnly;
  if (name == "individual_only") return PowerSplit::kIndividualOnly;
  if (name == "both") return PowerSplit::kBoth;
  throw Error("unknown power split: " + std::string(name));
}

Vec3 split_power(double p_t, PowerSplit split) {
  switch (split) {
    case PowerSplit::kTotalOnly:
      return {p_t, p_t, p_t};
    case PowerSplit::kIndividualOnly:
      return {p_t / 2, p_t / 2, 2 * p_t};
    case PowerSplit::kBoth:
      return {2 * p_t / 3, 2 * p_t / 3, p_t};
  }
  return {p_t, p_t, p_t};
}

std::string_view to_string(GridParam param) {
  switch (param) {
    case GridParam::kSnrDb:
      return "snr_db";
    case GridParam::kUsers:
      return "n_users";
    case GridParam::kRelayPosition:
      return "relay_position";
  }
  return "?";
}

GridParam grid_param_from_string(std::string_view name) {
  if (name == "snr_db") return GridParam::kSnrDb;
  if (name == "n_users") return GridParam::kUsers;
  if (name == "relay_position") return GridParam::kRelayPosition;
  throw Error("unknown grid parameter: " + std::string(name));
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  if (c.grid.empty()) errors.emplace_back("grid is empty");
  if (c.trials < 1) errors.emplace_back("trials must be at least 1");
  if (c.n_channels < 1) errors.emplace_back("n_channels must be positive");
  if (c.n_taps < 1) errors.emplace_back("n_taps must be positive");
  if (c.n_users < 1) errors.emplace_back("n_users must be positive");
  if (!(c.kappa > 0)) errors.emplace_back("kappa must be positive");
  if (!(c.sigma2 > 0)) errors.emplace_back("sigma2 must be positive");
  if (c.schemes.empty()) errors.emplace_back("no schemes requested");
  for (const auto& s : c.schemes) {
    if (!is_scheme(s)) errors.push_back("unknown scheme: " + s);
  }
  if (c.grid_param == GridParam::kUsers) {
    for (double v : c.grid) {
      if (v < 1 || v != std::floor(v)) errors.emplace_back("n_users grid values must be positive integers");
    }
    if (c.weight_mode == WeightMode::kExplicit) {
      errors.emplace_back("explicit weights cannot be combined with an n_users grid");
    }
  }
  if (c.weight_mode == WeightMode::kExplicit &&
      static_cast<int>(c.weights.size()) != c.n_users && c.grid_param != GridParam::kUsers) {
    errors.emplace_back("weights must have n_users entries");
  }
  if (c.layout == Layout::kArc && (!(c.d_sr > 0) || !(c.d_rd > 0))) {
    errors.emplace_back("arc layout needs positive d_sr and d_rd");
  }
  if (c.layout == Layout::kCluster && (!(c.d_sd > 0) || c.cluster_radius < 0)) {
    errors.emplace_back("cluster layout needs positive d_sd and nonnegative cluster_radius");
  }
  return errors;
}

Scenario build_trial_scenario(const ExperimentConfig& c, double grid_value, std::uint64_t trial) {
  int K = c.n_users;
  double snr_db = c.snr_db;
  double relay_position = c.relay_position;
  switch (c.grid_param) {
    case GridParam::kSnrDb:
      snr_db = grid_value;
      break;
    case GridParam::kUsers:
      K = static_cast<int>(grid_value);
      break;
    case GridParam::kRelayPosition:
      relay_position = grid_value;
      break;
  }
  const Geometry geo =
      c.layout == Layout::kArc
          ? arc_geometry(c.d_sr, c.d_rd, K, c.kappa, c.sigma2)
          : cluster_geometry(relay_position * c.d_sd, c.d_sd, K, c.cluster_radius * c.d_sd,
                             c.kappa, c.sigma2);
  const ChannelGains gains = generate_channels(geo, c.n_channels, c.n_taps, c.master_seed, trial);

  Scenario s;
  s.n_channels = c.n_channels;
  s.n_users = K;
  s.a = gains.a;
  s.b = gains.b;
  s.c = gains.c;
  switch (c.weight_mode) {
    case WeightMode::kEqual:
      s.w = VecX::Constant(K, 1.0 / K);
      break;
    case WeightMode::kUnit:
      s.w = VecX::Ones(K);
      break;
    case WeightMode::kExplicit:
      s.w = Eigen::Map<const VecX>(c.weights.data(), K);
      break;
  }
  const Vec3 p = split_power(pt_from_nominal_snr(db_to_linear(snr_db), geo, c.n_channels),
                             c.power_split);
  s.p_s = p(0);
  s.p_r = p(1);
  s.p_t = p(2);
  s.strategy = c.strategy;
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& c, int threads) {
  if (const auto errors = validate(c); !errors.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw Error(msg);
  }
  const int G = static_cast<int>(c.grid.size());
  const int S = static_cast<int>(c.schemes.size());
  const int T = c.trials;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  ExperimentResult out;
  out.samples.assign(G, std::vector<std::vector<double>>(S, std::vector<double>(T, kNaN)));

  // One task per (grid point, trial); each writes only its own cells.
  std::atomic<long> next{0};
  const long total = static_cast<long>(G) * T;
  auto worker = [&]() {
    for (long task = next++; task < total; task = next++) {
      const int g = static_cast<int>(task / T);
      const int t = static_cast<int>(task % T);
      Scenario s;
      try {
        s = build_trial_scenario(c, c.grid[g], static_cast<std::uint64_t>(t));
      } catch (const Error&) {
        continue;
      }
      for (int k = 0; k < S; ++k) {
        try {
          out.samples[g][k][t] = solve_scheme(c.schemes[k], s).primal_value / c.n_channels;
        } catch (const Error&) {
          // left as NaN and counted as failed
        }
      }
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int g = 0; g < G; ++g) {
    for (int k = 0; k < S; ++k) {
      ResultRow row;
      row.grid_param = std::string(to_string(c.grid_param));
      row.grid_value = c.grid[g];
      row.scheme = c.schemes[k];
      double sum = 0.0, sum_sq = 0.0;
      for (double v : out.samples[g][k]) {
        if (std::isnan(v)) {
          ++row.trials_failed;
          continue;
        }
        ++row.trials_ok;
        sum += v;
      }
      if (row.trials_ok > 0) {
        row.mean_rate = sum / row.trials_ok;
        for (double v : out.samples[g][k]) {
          if (!std::isnan(v)) sum_sq += (v - row.mean_rate) * (v - row.mean_rate);
        }
        if (row.trials_ok > 1) {
          row.stderr_rate = std::sqrt(sum_sq / (row.trials_ok - 1) / row.trials_ok);
        }
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

Scenario random_scenario(int N, int K, std::uint64_t seed, std::uint64_t index,
                         Strategy strategy) {
  std::mt19937_64 rng(link_seed(seed, index, 0xfeedULL));
  std::exponential_distribution<double> gain(1.0);
  std::uniform_real_distribution<double> limit(0.5, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Scenario s;
  s.n_channels = N;
  s.n_users = K;
  s.a.resize(N);
  s.b.resize(N, K);
  s.c.resize(N, K);
  s.w.resize(K);
  for (int m = 0; m < N; ++m) s.a(m) = gain(rng);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) s.b(n, k) = gain(rng);
  }
  for (int m = 0; m < N; ++m) {
    for (int k = 0; k < K; ++k) s.c(m, k) = gain(rng);
  }
  for (int k = 0; k < K; ++k) s.w(k) = 1.0 - unit(rng);
  s.w /= s.w.sum();
  s.p_s = limit(rng);
  s.p_r = limit(rng);
  s.p_t = limit(rng);
  s.strategy = strategy;
  return s;
}

}  // namespace relayopt
