// Command-line driver: analyze, sweep, simulate, validate, optimize.
//
// Precedence: built-in defaults < --config file < command-line flags.
// Exit codes: 0 success, 1 configuration error, 2 numeric failure,
// 3 validation check failed.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paoii/experiments.hpp"

namespace {

using paoii::ConfigError;
using paoii::ExperimentConfig;

struct Overrides {
  std::string config_path;
  std::optional<int> n_sensors;
  std::optional<double> lambda, load, alpha, beta, eps, psi, energy, slot;
  std::optional<std::vector<double>> percentiles;
  std::optional<std::size_t> samples, horizon, warmup, t_max;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta, tail_tol, q, beta_min, beta_max;
  std::optional<int> coarse_points, refine_iterations;
  std::optional<std::string> out, format;
  std::vector<std::string> sweeps;
  std::optional<unsigned> workers;
  bool no_timing = false;
};

paoii::SweepAxis parse_sweep_flag(const std::string& spec) {
  // param:min:max:points[:log|linear]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 4 || parts.size() > 5)
    throw ConfigError("--sweep expects param:min:max:points[:log|linear], got '" + spec + "'");
  paoii::SweepAxis ax;
  try {
    ax.param = parts[0];
    ax.min = std::stod(parts[1]);
    ax.max = std::stod(parts[2]);
    ax.points = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("--sweep has a malformed number in '" + spec + "'");
  }
  if (parts.size() == 5) {
    if (parts[4] != "log" && parts[4] != "linear") throw ConfigError("--sweep scale must be log or linear");
    ax.log_scale = parts[4] == "log";
  }
  return ax;
}

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : paoii::load_config(o.config_path);
  auto& p = cfg.params;
  if (o.n_sensors) p.n_sensors = *o.n_sensors;
  if (o.lambda) p.lambda = *o.lambda;
  if (o.load) p.lambda = *o.load / p.n_sensors;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.beta) p.beta = *o.beta;
  if (o.eps) p.eps = *o.eps;
  if (o.psi) p.psi = *o.psi;
  if (o.energy) p.energy_per_slot = *o.energy;
  if (o.slot) p.slot_duration = *o.slot;
  if (o.percentiles) cfg.percentiles = *o.percentiles;
  if (o.samples) cfg.sim.samples = *o.samples;
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.horizon) cfg.sim.horizon = *o.horizon;
  if (o.warmup) cfg.sim.warmup = *o.warmup;
  if (o.delta) cfg.sim.delta = *o.delta;
  if (o.t_max) cfg.t_max = *o.t_max;
  if (o.tail_tol) cfg.tail_tol = *o.tail_tol;
  if (o.q) cfg.optimize.percentile = *o.q;
  if (o.beta_min) cfg.optimize.beta_min = *o.beta_min;
  if (o.beta_max) cfg.optimize.beta_max = *o.beta_max;
  if (o.coarse_points) cfg.optimize.coarse_points = *o.coarse_points;
  if (o.refine_iterations) cfg.optimize.refine_iterations = *o.refine_iterations;
  if (o.out) cfg.out = *o.out;
  if (o.format) cfg.format = *o.format == "json" ? paoii::OutputFormat::json : paoii::OutputFormat::csv;
  if (!o.sweeps.empty()) {
    cfg.sweeps.clear();
    for (const auto& s : o.sweeps) cfg.sweeps.push_back(parse_sweep_flag(s));
  }
  if (o.workers) cfg.workers = *o.workers;
  if (o.no_timing) cfg.record_timing = false;
  cfg.validate();
  return cfg;
}

// Writes to cfg.out, or stdout when empty.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// Returns 2 when any row failed outright; uncertified tails only warn.
int emit_rows(const ExperimentConfig& cfg, const std::vector<paoii::ResultRow>& rows) {
  Sink sink(cfg.out);
  if (cfg.format == paoii::OutputFormat::json) paoii::write_json(sink.stream(), rows);
  else paoii::write_csv(sink.stream(), rows, cfg.percentiles);
  int rc = 0;
  for (const auto& r : rows) {
    if (r.ok()) continue;
    if (r.failed()) rc = 2;
    std::cerr << (r.failed() ? "numeric failure" : "warning") << " at beta=" << r.params.beta
              << " lambda=" << r.params.lambda << ": " << r.status << '\n';
  }
  return rc;
}

int cmd_validate(const ExperimentConfig& cfg) {
  const auto rep = paoii::run_validate(cfg);
  Sink sink(cfg.out);
  if (cfg.format == paoii::OutputFormat::json) {
    sink.stream() << paoii::to_json(rep).dump(1) << '\n';
  } else {
    auto& os = sink.stream();
    os << "samples,replications,sup_distance,argmax_slot,mu,delta,bound_probability,pass,"
          "analytic_goodput,simulated_goodput,goodput_stderr,analytic_power_W,simulated_power_W,"
          "power_stderr,analytic_tail_bound\n";
    using paoii::format_double;
    os << rep.samples << ',' << rep.replications << ',' << format_double(rep.dkw.distance) << ','
       << rep.dkw.argmax << ',' << format_double(rep.dkw.mu) << ',' << format_double(rep.dkw.delta) << ','
       << format_double(rep.bound_probability) << ',' << (rep.pass() ? "true" : "false") << ','
       << format_double(rep.analytic_goodput) << ',' << format_double(rep.simulated_goodput) << ','
       << format_double(rep.goodput_stderr) << ',' << format_double(rep.analytic_power) << ','
       << format_double(rep.simulated_power) << ',' << format_double(rep.power_stderr) << ','
       << format_double(rep.analytic_tail) << '\n';
  }
  std::cerr << "validate: sup-distance " << rep.dkw.distance << " vs mu " << rep.dkw.mu << " -> "
            << (rep.pass() ? "PASS" : "FAIL") << '\n';
  return rep.pass() ? 0 : 3;
}

int cmd_optimize(const ExperimentConfig& cfg) {
  const auto res = paoii::optimize_beta(cfg);
  Sink sink(cfg.out);
  if (cfg.format == paoii::OutputFormat::json) sink.stream() << paoii::to_json(res).dump(1) << '\n';
  else paoii::write_csv(sink.stream(), {res.row}, cfg.percentiles);
  std::cerr << "optimize: beta* = " << res.beta_star << " (q=" << cfg.optimize.percentile
            << " objective " << res.objective << " slots), collapse edge " << res.collapse_edge
            << ", margin x" << res.stability_margin << (res.multi_minima ? ", multiple minima" : "")
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peak age of incorrect information for reactive slotted ALOHA with lossy feedback"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Flat JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--n-sensors", o.n_sensors, "Number of sensors N");
    sub->add_option("--lambda", o.lambda, "Per-slot anomaly probability");
    sub->add_option("--load", o.load, "Aggregate load N*lambda (sets lambda)");
    sub->add_option("--alpha", o.alpha, "Active transmit probability");
    sub->add_option("--beta", o.beta, "Backoff transmit probability");
    sub->add_option("--eps", o.eps, "Uplink error probability");
    sub->add_option("--psi", o.psi, "ACK loss probability");
    sub->add_option("--energy", o.energy, "Energy per transmitting slot [J]");
    sub->add_option("--slot", o.slot, "Slot duration [s]");
    sub->add_option("--percentiles", o.percentiles, "PAoII percentiles to report")->delimiter(',');
    sub->add_option("--t-max", o.t_max, "PMF horizon in slots");
    sub->add_option("--tail-tol", o.tail_tol, "PMF tail tolerance");
    sub->add_option("--samples", o.samples, "Target number of simulated PAoII samples L");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--horizon", o.horizon, "Measured slots per replication");
    sub->add_option("--warmup", o.warmup, "Discarded slots per replication");
    sub->add_option("--delta", o.delta, "DKW confidence parameter");
    sub->add_option("--out", o.out, "Output path (default stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", o.workers, "Worker threads (default $PAOII_WORKERS or logical cores)");
    sub->add_flag("--no-timing", o.no_timing, "Write wall_ms as 0 for byte-reproducible output");
  };

  auto* analyze = app.add_subcommand("analyze", "Analytic metrics and PAoII percentiles for one point");
  auto* sweep = app.add_subcommand("sweep", "Analytic grid over one or more parameters");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate for one point");
  auto* validate = app.add_subcommand("validate", "DKW comparison of analytic and simulated PAoII");
  auto* optimize = app.add_subcommand("optimize", "Minimise a PAoII percentile over beta");
  for (auto* sub : {analyze, sweep, simulate, validate, optimize}) add_common(sub);
  sweep->add_option("--sweep", o.sweeps, "Axis param:min:max:points[:log|linear] (repeatable)");
  optimize->add_option("--q", o.q, "Percentile to minimise");
  optimize->add_option("--beta-min", o.beta_min, "Lower end of the beta grid");
  optimize->add_option("--beta-max", o.beta_max, "Upper end of the beta grid");
  optimize->add_option("--coarse-points", o.coarse_points, "Log-spaced grid size");
  optimize->add_option("--refine-iterations", o.refine_iterations, "Golden-section evaluations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const auto cfg = build_config(o);
    if (analyze->parsed()) return emit_rows(cfg, {paoii::run_analyze(cfg)});
    if (sweep->parsed()) return emit_rows(cfg, paoii::run_sweep(cfg));
    if (simulate->parsed()) return emit_rows(cfg, {paoii::run_simulate(cfg)});
    if (validate->parsed()) return cmd_validate(cfg);
    if (optimize->parsed()) return cmd_optimize(cfg);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const paoii::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  }
}
