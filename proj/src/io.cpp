#include "relayopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace relayopt {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw SchemaError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw SchemaError(std::string(what) + ": unknown key \"" + key + "\"");
  }
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw SchemaError(std::string("\"") + key + "\" must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw SchemaError(std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

std::string text(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw SchemaError(std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

VecX vector_of(const json& v, const char* key, Index size) {
  if (!v.is_array() || static_cast<Index>(v.size()) != size) {
    throw SchemaError(std::string("\"") + key + "\" must be an array of " + std::to_string(size) +
                      " numbers");
  }
  VecX out(size);
  for (Index i = 0; i < size; ++i) {
    if (!v[i].is_number()) throw SchemaError(std::string("\"") + key + "\" has a non-number");
    out(i) = v[i].get<double>();
  }
  return out;
}

MatX matrix_of(const json& v, const char* key, Index rows, Index cols) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
    throw SchemaError(std::string("\"") + key + "\" must have " + std::to_string(rows) + " rows");
  }
  MatX out(rows, cols);
  for (Index r = 0; r < rows; ++r) out.row(r) = vector_of(v[r], key, cols).transpose();
  return out;
}

json vec_json(const VecX& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  reject_unknown(j,
                 {"n_channels", "n_users", "a", "b", "c", "w", "p_s", "p_r", "p_t", "strategy"},
                 "scenario");
  Scenario s;
  s.n_channels = integer(j, "n_channels");
  s.n_users = integer(j, "n_users");
  if (s.n_channels <= 0 || s.n_users <= 0) {
    throw SchemaError("n_channels and n_users must be positive");
  }
  s.a = vector_of(require(j, "a"), "a", s.n_channels);
  s.b = matrix_of(require(j, "b"), "b", s.n_channels, s.n_users);
  s.c = matrix_of(require(j, "c"), "c", s.n_channels, s.n_users);
  s.w = vector_of(require(j, "w"), "w", s.n_users);
  s.p_s = number(j, "p_s");
  s.p_r = number(j, "p_r");
  s.p_t = number(j, "p_t");
  if (j.contains("strategy")) {
    try {
      s.strategy = strategy_from_string(text(j, "strategy"));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(e.what());
    }
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["n_channels"] = s.n_channels;
  j["n_users"] = s.n_users;
  j["a"] = vec_json(s.a);
  j["b"] = json::array();
  j["c"] = json::array();
  for (Index m = 0; m < s.b.rows(); ++m) j["b"].push_back(vec_json(s.b.row(m).transpose()));
  for (Index m = 0; m < s.c.rows(); ++m) j["c"].push_back(vec_json(s.c.row(m).transpose()));
  j["w"] = vec_json(s.w);
  j["p_s"] = s.p_s;
  j["p_r"] = s.p_r;
  j["p_t"] = s.p_t;
  j["strategy"] = std::string(to_string(s.strategy));
  return j;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(parse_file(path)); }

json solve_result_to_json(const SolveResult& r, const std::string& scheme) {
  json j;
  j["scheme"] = scheme;
  j["assignment"] = {{"pairing", r.assignment.pairing}, {"users", r.assignment.user_of_pair}};
  j["powers"] = {{"ps", vec_json(r.powers.ps)}, {"pr", vec_json(r.powers.pr)}};
  j["primal"] = finite_or_null(r.primal_value);
  j["dual"] = finite_or_null(r.dual_value);
  j["gap"] = finite_or_null(r.gap);
  j["iterations"] = r.iterations;
  j["region"] = std::string(to_string(r.region_used));
  j["per_path_rates"] = vec_json(r.per_path_rates);
  j["lambda"] = vec_json(r.lambda);
  j["converged"] = r.converged;
  j["gap_flag"] = r.gap_flag;
  j["region_consistent"] = r.region_consistent;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j,
                 {"name", "grid", "n_channels", "n_taps", "n_users", "snr_db", "layout", "d_sr",
                  "d_rd", "d_sd", "relay_position", "cluster_radius", "weights", "power_split",
                  "strategy", "schemes", "trials", "seed", "kappa", "sigma2"},
                 "experiment config");
  ExperimentConfig c;
  try {
    if (j.contains("name")) c.name = text(j, "name");
    const json& grid = require(j, "grid");
    reject_unknown(grid, {"param", "values"}, "grid");
    c.grid_param = grid_param_from_string(text(grid, "param"));
    const json& values = require(grid, "values");
    if (!values.is_array()) throw SchemaError("grid.values must be an array");
    for (const auto& v : values) {
      if (!v.is_number()) throw SchemaError("grid.values must be numbers");
      c.grid.push_back(v.get<double>());
    }
    if (j.contains("n_channels")) c.n_channels = integer(j, "n_channels");
    if (j.contains("n_taps")) c.n_taps = integer(j, "n_taps");
    if (j.contains("n_users")) c.n_users = integer(j, "n_users");
    if (j.contains("snr_db")) c.snr_db = number(j, "snr_db");
    if (j.contains("layout")) {
      const std::string layout = text(j, "layout");
      if (layout == "arc")
        c.layout = Layout::kArc;
      else if (layout == "cluster")
        c.layout = Layout::kCluster;
      else
        throw SchemaError("layout must be \"arc\" or \"cluster\"");
    }
    if (j.contains("d_sr")) c.d_sr = number(j, "d_sr");
    if (j.contains("d_rd")) c.d_rd = number(j, "d_rd");
    if (j.contains("d_sd")) c.d_sd = number(j, "d_sd");
    if (j.contains("relay_position")) c.relay_position = number(j, "relay_position");
    if (j.contains("cluster_radius")) c.cluster_radius = number(j, "cluster_radius");
    if (j.contains("weights")) {
      const json& w = j.at("weights");
      if (w == "equal") {
        c.weight_mode = WeightMode::kEqual;
      } else if (w == "unit") {
        c.weight_mode = WeightMode::kUnit;
      } else if (w.is_array()) {
        c.weight_mode = WeightMode::kExplicit;
        for (const auto& v : w) {
          if (!v.is_number()) throw SchemaError("weights must be numbers");
          c.weights.push_back(v.get<double>());
        }
      } else {
        throw SchemaError("weights must be \"equal\", \"unit\" or an array");
      }
    }
    if (j.contains("power_split")) c.power_split = power_split_from_string(text(j, "power_split"));
    if (j.contains("strategy")) c.strategy = strategy_from_string(text(j, "strategy"));
    if (j.contains("schemes")) {
      const json& s = j.at("schemes");
      if (!s.is_array()) throw SchemaError("schemes must be an array");
      c.schemes.clear();
      for (const auto& v : s) {
        if (!v.is_string()) throw SchemaError("schemes must be strings");
        c.schemes.push_back(v.get<std::string>());
      }
    }
    if (j.contains("trials")) c.trials = integer(j, "trials");
    if (j.contains("seed")) {
      const json& v = j.at("seed");
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw SchemaError("seed must be a nonnegative integer");
      }
      c.master_seed = v.get<std::uint64_t>();
    }
    if (j.contains("kappa")) c.kappa = number(j, "kappa");
    if (j.contains("sigma2")) c.sigma2 = number(j, "sigma2");
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  if (const auto errors = validate(c); !errors.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw SchemaError(msg);
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(parse_file(path));
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "grid_param_name,grid_value,scheme,mean_rate,stderr,trials_ok,trials_failed\n";
  for (const auto& r : rows) {
    out += r.grid_param + "," + format_double(r.grid_value) + "," + r.scheme + "," +
           format_double(r.mean_rate) + "," + format_double(r.stderr_rate) + "," +
           std::to_string(r.trials_ok) + "," + std::to_string(r.trials_failed) + "\n";
  }
  return out;
}

std::vector<ResultRow> results_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<ResultRow> rows;
  if (!std::getline(in, line)) throw SchemaError("empty CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw SchemaError("CSV row needs 7 fields: " + line);
    ResultRow r;
    r.grid_param = f[0];
    r.grid_value = std::stod(f[1]);
    r.scheme = f[2];
    r.mean_rate = std::stod(f[3]);
    r.stderr_rate = std::stod(f[4]);
    r.trials_ok = std::stoi(f[5]);
    r.trials_failed = std::stoi(f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "region,iteration,g,theta_norm,ls,lr,lt\n";
  for (const auto& t : trace) {
    out += std::string(to_string(t.region)) + "," + std::to_string(t.iteration) + "," +
           format_double(t.g) + "," + format_double(t.theta_norm) + "," +
           format_double(t.lambda(0)) + "," + format_double(t.lambda(1)) + "," +
           format_double(t.lambda(2)) + "\n";
  }
  return out;
}

}  // namespace relayopt
