#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "relayopt/model.hpp"

namespace relayopt {

/// Node placement in the plane: source at the origin, relay at (d_sr, 0),
/// users at `users`. Distances below d_min are clamped.
struct Geometry {
  double d_sr = 1.0;
  std::vector<Eigen::Vector2d> users;
  double kappa = 3.0;
  double sigma2 = 1.0;
  double d_min = 1e-3;

  VecX relay_user_distances() const;
  VecX source_user_distances() const;
  double source_relay_distance() const;
  double mean_source_user_distance() const;
};

/// K users on the half-circle of radius d_rd around the relay that faces
/// away from the source, at angles -90 + 180 (k + 1/2) / K degrees from the
/// source-relay axis.
Geometry arc_geometry(double d_sr, double d_rd, int n_users, double kappa = 3.0,
                      double sigma2 = 1.0);

/// K users evenly spread on a circle of radius `radius` centred at (d_sd, 0),
/// with the relay at (d_sr, 0).
Geometry cluster_geometry(double d_sr, double d_sd, int n_users, double radius,
                          double kappa = 3.0, double sigma2 = 1.0);

struct ChannelGains {
  VecX a;
  MatX b;
  MatX c;
};

// Seed for one link's fading stream.
std::uint64_t link_seed(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t link);

/// Frequency-selective Rayleigh gains: n_taps CN(0, 1/n_taps) taps per link,
/// N-point DFT, squared magnitude times distance^-kappa over sigma2. All
/// streams derive from (master_seed, trial), so every grid point of an
/// experiment sees the same fading.
ChannelGains generate_channels(const Geometry& geometry, int n_channels, int n_taps,
                               std::uint64_t master_seed, std::uint64_t trial);

// Total power for a nominal SNR: snr * 2 sigma2 N dbar^kappa.
double pt_from_nominal_snr(double snr_linear, const Geometry& geometry, int n_channels);

double db_to_linear(double db);

enum class PowerSplit { kTotalOnly, kIndividualOnly, kBoth };

std::string_view to_string(PowerSplit split);
PowerSplit power_split_from_string(std::string_view name);

/// (p_s, p_r, p_t) for a nominal total budget:
///   both: p_s = p_r = 2/3 p_t;  total only: p_s = p_r = p_t;
///   individual only: p_s = p_r = p_t / 2 with the total limit relaxed to 2 p_t.
Vec3 split_power(double p_t, PowerSplit split);

enum class Layout { kArc, kCluster };

enum class GridParam { kSnrDb, kUsers, kRelayPosition };

std::string_view to_string(GridParam param);
GridParam grid_param_from_string(std::string_view name);

enum class WeightMode { kEqual, kUnit, kExplicit };

struct ExperimentConfig {
  std::string name;
  GridParam grid_param = GridParam::kSnrDb;
  std::vector<double> grid;

  int n_channels = 16;
  int n_taps = 4;
  int n_users = 4;
  double snr_db = 4.0;

  Layout layout = Layout::kArc;
  double d_sr = 0.25;  // arc layout
  double d_rd = 0.75;
  double d_sd = 1.0;   // cluster layout
  double relay_position = 0.5;  // d_sr / d_sd
  double cluster_radius = 0.05;  // fraction of d_sd

  WeightMode weight_mode = WeightMode::kEqual;
  std::vector<double> weights;

  PowerSplit power_split = PowerSplit::kBoth;
  Strategy strategy = Strategy::kDF;
  std::vector<std::string> schemes{"joint", "no_pairing", "no_pa", "separate", "max_gain"};
  int trials = 100;
  std::uint64_t master_seed = 1;
  double kappa = 3.0;
  double sigma2 = 1.0;
};

// Empty when the config is usable.
std::vector<std::string> validate(const ExperimentConfig& config);

// Scenario of one trial at one grid value.
Scenario build_trial_scenario(const ExperimentConfig& config, double grid_value,
                              std::uint64_t trial);

struct ResultRow {
  std::string grid_param;
  double grid_value = 0.0;
  std::string scheme;
  double mean_rate = 0.0;  // weighted sum-rate divided by N
  double stderr_rate = 0.0;
  int trials_ok = 0;
  int trials_failed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // grid-major, schemes in config order
  // samples[g][s][t]: normalized rate, NaN for a failed trial
  std::vector<std::vector<std::vector<double>>> samples;
};

ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

/// Test instance with Exp(1) gains, limits uniform on [0.5, 4] and weights
/// uniform on (0, 1] normalized to sum one. Instance `index` of a seed is
/// independent of every other index.
Scenario random_scenario(int n_channels, int n_users, std::uint64_t seed, std::uint64_t index,
                         Strategy strategy = Strategy::kDF);

}  // namespace relayopt
