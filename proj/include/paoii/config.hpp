#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "params.hpp"

namespace paoii {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { csv, json };

// One sweep axis. Recognised parameters: n_sensors, lambda, load, alpha,
// beta, eps, psi. "load" sets lambda = load / n_sensors.
struct SweepAxis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  int points = 2;
  bool log_scale = false;

  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
      const double f = static_cast<double>(i) / (points - 1);
      out[static_cast<std::size_t>(i)] =
          log_scale ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                    : min + f * (max - min);
    }
    out.back() = max;
    return out;
  }
};

struct SimulationConfig {
  std::size_t samples = 1000000;  // target PAoII sample count L
  std::uint64_t seed = 1;
  std::size_t horizon = 100000;   // measured slots per replication
  std::size_t warmup = 1000;
  double delta = 1e-6;            // DKW confidence parameter
};

struct OptimizeConfig {
  double percentile = 0.95;
  double beta_min = 1e-3;
  double beta_max = 1.0;
  int coarse_points = 25;
  int refine_iterations = 24;
  double plateau_fraction = 0.9;  // collapse edge: last beta with G >= fraction * max G
};

struct ExperimentConfig {
  SystemParams params;
  std::vector<SweepAxis> sweeps;
  std::vector<double> percentiles{0.5, 0.9, 0.95, 0.99};
  SimulationConfig sim;
  OptimizeConfig optimize;
  std::size_t t_max = 10000;
  double tail_tol = 1e-9;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  bool record_timing = true;
  unsigned workers = 0;  // 0: PAOII_WORKERS or hardware concurrency

  void validate() const {
    try {
      params.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    for (const auto& ax : sweeps) validate_axis(ax);
    if (percentiles.empty()) throw ConfigError("percentiles must not be empty");
    for (std::size_t i = 0; i < percentiles.size(); ++i) {
      if (!(percentiles[i] > 0.0 && percentiles[i] < 1.0))
        throw ConfigError("percentiles must lie in (0,1)");
      if (i > 0 && percentiles[i] <= percentiles[i - 1])
        throw ConfigError("percentiles must be strictly increasing");
    }
    if (sim.samples < 1) throw ConfigError("samples must be >= 1");
    if (sim.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(sim.delta > 0.0 && sim.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("tail_tol must lie in (0,1)");
    const auto& o = optimize;
    if (!(o.percentile > 0.0 && o.percentile < 1.0)) throw ConfigError("q must lie in (0,1)");
    if (!(o.beta_min > 0.0 && o.beta_min < o.beta_max && o.beta_max <= 1.0))
      throw ConfigError("beta_min/beta_max must satisfy 0 < beta_min < beta_max <= 1");
    if (o.coarse_points < 3) throw ConfigError("coarse_points must be >= 3");
    if (o.refine_iterations < 0) throw ConfigError("refine_iterations must be >= 0");
    if (!(o.plateau_fraction > 0.0 && o.plateau_fraction < 1.0))
      throw ConfigError("plateau_fraction must lie in (0,1)");
  }

 private:
  void validate_axis(const SweepAxis& ax) const {
    const std::string where = "sweep axis '" + ax.param + "': ";
    if (ax.points < 2) throw ConfigError(where + "points must be >= 2");
    if (!(ax.min <= ax.max)) throw ConfigError(where + "min must not exceed max");
    if (ax.log_scale && !(ax.min > 0.0)) throw ConfigError(where + "log scale needs min > 0");
    for (double v : ax.values()) {
      SystemParams p = params;
      apply_axis_value(p, ax.param, v);
      try {
        p.validate();
      } catch (const DomainError& e) {
        throw ConfigError(where + e.what());
      }
    }
  }

 public:
  static void apply_axis_value(SystemParams& p, const std::string& name, double v) {
    if (name == "n_sensors") {
      if (v != std::round(v)) throw ConfigError("n_sensors sweep values must be integral");
      p.n_sensors = static_cast<int>(v);
    } else if (name == "lambda") p.lambda = v;
    else if (name == "load") p.lambda = v / p.n_sensors;
    else if (name == "alpha") p.alpha = v;
    else if (name == "beta") p.beta = v;
    else if (name == "eps") p.eps = v;
    else if (name == "psi") p.psi = v;
    else throw ConfigError("unknown sweep parameter '" + name + "'");
  }
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <typename T>
T json_get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("field '" + key + "' has the wrong type");
  }
}

inline SweepAxis parse_axis(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep entries must be objects");
  SweepAxis ax;
  for (const auto& [key, val] : j.items()) {
    if (key == "param") ax.param = json_get<std::string>(val, "sweep.param");
    else if (key == "min") ax.min = json_get<double>(val, "sweep.min");
    else if (key == "max") ax.max = json_get<double>(val, "sweep.max");
    else if (key == "points") ax.points = json_get<int>(val, "sweep.points");
    else if (key == "scale") {
      const auto s = json_get<std::string>(val, "sweep.scale");
      if (s != "log" && s != "linear") throw ConfigError("sweep.scale must be 'log' or 'linear'");
      ax.log_scale = s == "log";
    } else throw ConfigError("unknown sweep field '" + key + "'");
  }
  if (ax.param.empty()) throw ConfigError("sweep entry lacks 'param'");
  return ax;
}

}  // namespace detail

// Overlays the keys of a JSON object onto cfg. "load" is applied after
// n_sensors and overrides lambda.
inline void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  using detail::json_get;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  std::optional<double> load;
  for (const auto& [key, val] : j.items()) {
    auto& p = cfg.params;
    if (key == "n_sensors") p.n_sensors = json_get<int>(val, key);
    else if (key == "lambda") p.lambda = json_get<double>(val, key);
    else if (key == "load") load = json_get<double>(val, key);
    else if (key == "alpha") p.alpha = json_get<double>(val, key);
    else if (key == "beta") p.beta = json_get<double>(val, key);
    else if (key == "eps") p.eps = json_get<double>(val, key);
    else if (key == "psi") p.psi = json_get<double>(val, key);
    else if (key == "energy_per_slot") p.energy_per_slot = json_get<double>(val, key);
    else if (key == "slot_duration") p.slot_duration = json_get<double>(val, key);
    else if (key == "percentiles") cfg.percentiles = json_get<std::vector<double>>(val, key);
    else if (key == "samples") cfg.sim.samples = json_get<std::size_t>(val, key);
    else if (key == "seed") cfg.sim.seed = json_get<std::uint64_t>(val, key);
    else if (key == "horizon") cfg.sim.horizon = json_get<std::size_t>(val, key);
    else if (key == "warmup") cfg.sim.warmup = json_get<std::size_t>(val, key);
    else if (key == "delta") cfg.sim.delta = json_get<double>(val, key);
    else if (key == "t_max") cfg.t_max = json_get<std::size_t>(val, key);
    else if (key == "tail_tol") cfg.tail_tol = json_get<double>(val, key);
    else if (key == "q") cfg.optimize.percentile = json_get<double>(val, key);
    else if (key == "beta_min") cfg.optimize.beta_min = json_get<double>(val, key);
    else if (key == "beta_max") cfg.optimize.beta_max = json_get<double>(val, key);
    else if (key == "coarse_points") cfg.optimize.coarse_points = json_get<int>(val, key);
    else if (key == "refine_iterations") cfg.optimize.refine_iterations = json_get<int>(val, key);
    else if (key == "plateau_fraction") cfg.optimize.plateau_fraction = json_get<double>(val, key);
    else if (key == "out") cfg.out = json_get<std::string>(val, key);
    else if (key == "format") {
      const auto f = json_get<std::string>(val, key);
      if (f == "csv") cfg.format = OutputFormat::csv;
      else if (f == "json") cfg.format = OutputFormat::json;
      else throw ConfigError("format must be 'csv' or 'json'");
    } else if (key == "record_timing") cfg.record_timing = json_get<bool>(val, key);
    else if (key == "workers") cfg.workers = json_get<unsigned>(val, key);
    else if (key == "sweep") {
      if (!val.is_array()) throw ConfigError("field 'sweep' must be an array");
      cfg.sweeps.clear();
      for (const auto& ax : val) cfg.sweeps.push_back(detail::parse_axis(ax));
    } else throw ConfigError("unknown field '" + key + "'");
  }
  if (load) cfg.params.lambda = *load / cfg.params.n_sensors;
}

inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    cfg.validate();
    return cfg;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("parse error at line " + std::to_string(detail::line_of_offset(text, e.byte)) +
                      ": " + e.what());
  }
  apply_json(cfg, j);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace paoii
