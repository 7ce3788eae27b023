#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"
#include "simulator.hpp"
#include "validation.hpp"

namespace paoii {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr const char* kTailNotReached = "tail_not_reached";

struct ResultRow {
  SystemParams params;
  double goodput = kNaN;
  double power = kNaN;
  std::vector<double> quantiles;      // requested q values
  std::vector<double> paoii_slots;    // NaN when q exceeds the certified mass
  double tail_bound = kNaN;
  std::string engine = "analytic";
  double wall_ms = 0.0;
  std::string status = "ok";         // "tail_not_reached" or the error of a failed sweep point
  std::vector<double> distribution;   // PMF (analytic) or ECDF (simulated); JSON only

  double paoii_seconds(std::size_t i) const { return paoii_slots[i] * params.slot_duration; }
  bool ok() const { return status == "ok"; }
  bool failed() const { return !ok() && status != kTailNotReached; }
};

// PAOII_WORKERS overrides the default of one worker per logical core.
inline unsigned resolve_workers(unsigned configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("PAOII_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return default_workers();
}

// Runs task(i) for i in [0, count) on a worker pool; results are written by
// index so ordering never depends on completion time.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& t : pool) t.join();
}

inline AnalysisOptions analysis_options(const ExperimentConfig& cfg) {
  AnalysisOptions opt;
  opt.pmf.t_max = cfg.t_max;
  opt.pmf.tail_tol = cfg.tail_tol;
  return opt;
}

inline ResultRow row_from_analysis(const AnalysisResult& r, const ExperimentConfig& cfg) {
  ResultRow row;
  row.params = r.params;
  row.goodput = r.metrics.goodput;
  row.power = r.metrics.power;
  row.quantiles = cfg.percentiles;
  row.paoii_slots.assign(cfg.percentiles.size(), kNaN);
  if (!r.pmf.mass.empty()) {
    row.tail_bound = r.pmf.tail_bound;
    for (std::size_t i = 0; i < cfg.percentiles.size(); ++i)
      if (r.pmf.cumulative() >= cfg.percentiles[i])
        row.paoii_slots[i] = static_cast<double>(paoii_quantile(r.pmf, cfg.percentiles[i]));
    row.distribution = r.pmf.mass;
    if (!r.pmf.tail_reached) row.status = kTailNotReached;
  }
  row.wall_ms = cfg.record_timing ? r.wall_ms : 0.0;
  return row;
}

inline ResultRow run_analyze(const ExperimentConfig& cfg) {
  cfg.validate();
  return row_from_analysis(analyze(cfg.params, analysis_options(cfg)), cfg);
}

inline SimulationControls simulation_controls(const ExperimentConfig& cfg) {
  SimulationControls ctl;
  ctl.slots_per_replication = cfg.sim.horizon;
  ctl.warmup_slots = cfg.sim.warmup;
  ctl.workers = resolve_workers(cfg.workers);
  return ctl;
}

// Smallest t with F_L(t) >= q.
inline double empirical_quantile(const EmpiricalCdf& ecdf, double q) {
  for (std::size_t t = 1; t <= ecdf.max_value(); ++t)
    if (ecdf(static_cast<double>(t)) >= q) return static_cast<double>(t);
  return static_cast<double>(ecdf.max_value());
}

inline ResultRow row_from_samples(const SampleSet& s, const ExperimentConfig& cfg, double wall_ms) {
  ResultRow row;
  row.params = cfg.params;
  row.engine = "simulated";
  row.goodput = s.goodput();
  row.power = s.power(cfg.params);
  row.quantiles = cfg.percentiles;
  row.paoii_slots.assign(cfg.percentiles.size(), kNaN);
  row.tail_bound = 0.0;
  if (!s.paoii_samples.empty()) {
    const EmpiricalCdf ecdf(s.paoii_samples);
    for (std::size_t i = 0; i < cfg.percentiles.size(); ++i)
      row.paoii_slots[i] = empirical_quantile(ecdf, cfg.percentiles[i]);
    for (std::size_t t = 1; t <= ecdf.max_value(); ++t) row.distribution.push_back(ecdf(static_cast<double>(t)));
  }
  row.wall_ms = cfg.record_timing ? wall_ms : 0.0;
  return row;
}

inline SampleSet simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_until_samples(cfg.params, cfg.sim.seed, cfg.sim.samples, simulation_controls(cfg));
}

inline ResultRow run_simulate(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = simulate(cfg);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row_from_samples(s, cfg, ms);
}

// Cartesian product of the sweep axes, first axis outermost.
inline std::vector<SystemParams> sweep_points(const ExperimentConfig& cfg) {
  if (cfg.sweeps.empty()) throw ConfigError("sweep requires at least one axis");
  std::vector<SystemParams> points{cfg.params};
  for (const auto& ax : cfg.sweeps) {
    std::vector<SystemParams> next;
    for (const auto& base : points)
      for (double v : ax.values()) {
        SystemParams p = base;
        ExperimentConfig::apply_axis_value(p, ax.param, v);
        next.push_back(p);
      }
    points = std::move(next);
  }
  return points;
}

inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto points = sweep_points(cfg);
  std::vector<ResultRow> rows(points.size());
  const auto opt = analysis_options(cfg);
  parallel_for(points.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
    try {
      rows[i] = row_from_analysis(analyze(points[i], opt), cfg);
    } catch (const std::exception& e) {
      ResultRow failed;
      failed.params = points[i];
      failed.quantiles = cfg.percentiles;
      failed.paoii_slots.assign(cfg.percentiles.size(), kNaN);
      failed.status = e.what();
      rows[i] = failed;
    }
  });
  return rows;
}

struct ValidationReport {
  SystemParams params;
  std::size_t samples = 0;
  std::size_t replications = 0;
  DkwResult dkw;
  double bound_probability = 0.0;  // exp(-2 L mu^2)
  double analytic_goodput = 0.0;
  double simulated_goodput = 0.0;
  double goodput_stderr = 0.0;
  double analytic_power = 0.0;
  double simulated_power = 0.0;
  double power_stderr = 0.0;
  double analytic_tail = 0.0;

  bool pass() const { return dkw.pass; }
};

// Standard error of a ratio-of-totals estimator across replications.
inline double replication_stderr(const std::vector<double>& per_rep) {
  const auto n = static_cast<double>(per_rep.size());
  if (per_rep.size() < 2) return kNaN;
  double mean = 0.0;
  for (double x : per_rep) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : per_rep) var += (x - mean) * (x - mean);
  return std::sqrt(var / (n - 1.0) / n);
}

inline ValidationReport run_validate(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto analytic = analyze(cfg.params, analysis_options(cfg));
  const auto sim = simulate(cfg);
  ValidationReport rep;
  rep.params = cfg.params;
  rep.samples = sim.paoii_samples.size();
  rep.replications = sim.replications;
  rep.dkw = dkw_check(EmpiricalCdf(sim.paoii_samples), analytic.pmf.cdf(), rep.samples, cfg.sim.delta);
  rep.bound_probability = dkw_bound_probability(rep.samples, rep.dkw.mu);
  rep.analytic_goodput = analytic.metrics.goodput;
  rep.analytic_power = analytic.metrics.power;
  rep.analytic_tail = analytic.pmf.tail_bound;
  rep.simulated_goodput = sim.goodput();
  rep.simulated_power = sim.power(cfg.params);
  std::vector<double> g, pw;
  const auto& p = cfg.params;
  for (const auto& r : sim.per_replication) {
    const auto slots = static_cast<double>(r.slots);
    g.push_back(static_cast<double>(r.novel_successes) / slots);
    pw.push_back(static_cast<double>(r.transmitting_slots) * p.energy_per_slot /
                 (p.n_sensors * slots * p.slot_duration));
  }
  rep.goodput_stderr = replication_stderr(g);
  rep.power_stderr = replication_stderr(pw);
  return rep;
}

struct BetaGridPoint {
  double beta = 0.0;
  double objective = kNaN;  // interpolated q-quantile in slots; +inf if uncertified
  double goodput = kNaN;
};

struct OptimizeResult {
  double beta_star = kNaN;
  double objective = kNaN;
  ResultRow row;
  double collapse_edge = kNaN;     // largest beta with G >= plateau_fraction * max G
  double plateau_goodput = kNaN;
  double stability_margin = kNaN;  // collapse_edge / beta_star
  bool multi_minima = false;
  std::vector<BetaGridPoint> grid;
  std::vector<BetaGridPoint> refinements;
};

namespace detail {

inline double objective_of(const AnalysisResult& r, double q) {
  if (r.pmf.mass.empty() || r.pmf.cumulative() < q) return std::numeric_limits<double>::infinity();
  return paoii_quantile_interpolated(r.pmf, q);
}

}  // namespace detail

// Coarse log-spaced grid over beta, then golden-section refinement in log beta
// around the best grid point. The refined point is only accepted when it beats
// the grid.
inline OptimizeResult optimize_beta(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& oc = cfg.optimize;
  const double q = oc.percentile;
  const auto opt = analysis_options(cfg);
  auto eval = [&](double beta) {
    SystemParams p = cfg.params;
    p.beta = beta;
    return analyze(p, opt);
  };

  OptimizeResult res;
  const SweepAxis axis{"beta", oc.beta_min, oc.beta_max, oc.coarse_points, true};
  const auto betas = axis.values();
  res.grid.resize(betas.size());
  parallel_for(betas.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
    const auto r = eval(betas[i]);
    res.grid[i] = {betas[i], detail::objective_of(r, q), r.metrics.goodput};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < res.grid.size(); ++i)
    if (res.grid[i].objective < res.grid[best].objective) best = i;
  if (!std::isfinite(res.grid[best].objective))
    throw SolverError("optimize_beta: no grid point certifies the requested percentile", 1.0);

  int local_minima = 0;
  for (std::size_t i = 0; i < res.grid.size(); ++i) {
    const double f = res.grid[i].objective;
    if (!std::isfinite(f)) continue;
    const bool left = i == 0 || f < res.grid[i - 1].objective;
    const bool right = i + 1 == res.grid.size() || f < res.grid[i + 1].objective;
    if (left && right) ++local_minima;
  }
  res.multi_minima = local_minima > 1;

  double best_beta = res.grid[best].beta;
  double best_obj = res.grid[best].objective;
  double lo = std::log(res.grid[best == 0 ? 0 : best - 1].beta);
  double hi = std::log(res.grid[std::min(best + 1, res.grid.size() - 1)].beta);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto probe = [&](double x) {
    const double beta = std::exp(x);
    const auto r = eval(beta);
    const double f = detail::objective_of(r, q);
    res.refinements.push_back({beta, f, r.metrics.goodput});
    if (f < best_obj) {
      best_obj = f;
      best_beta = beta;
    }
    return f;
  };
  if (oc.refine_iterations > 0 && hi > lo) {
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = probe(x1);
    double f2 = probe(x2);
    for (int it = 2; it < oc.refine_iterations; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = probe(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = probe(x2);
      }
    }
  }
  res.beta_star = best_beta;
  res.objective = best_obj;
  ExperimentConfig at = cfg;
  at.params.beta = best_beta;
  res.row = run_analyze(at);

  res.plateau_goodput = 0.0;
  for (const auto& g : res.grid) res.plateau_goodput = std::max(res.plateau_goodput, g.goodput);
  const double threshold = oc.plateau_fraction * res.plateau_goodput;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < res.grid.size(); ++i)
    if (res.grid[i].goodput > res.grid[peak].goodput) peak = i;
  std::size_t edge = peak;
  while (edge + 1 < res.grid.size() && res.grid[edge + 1].goodput >= threshold) ++edge;
  res.collapse_edge = res.grid[edge].beta;
  if (edge + 1 < res.grid.size()) {
    // Bisection in log beta on G(beta) - threshold.
    double a = std::log(res.grid[edge].beta);
    double b = std::log(res.grid[edge + 1].beta);
    AnalysisOptions metrics_only = opt;
    metrics_only.compute_pmf = false;
    for (int it = 0; it < 20; ++it) {
      const double mid = 0.5 * (a + b);
      SystemParams p = cfg.params;
      p.beta = std::exp(mid);
      if (analyze(p, metrics_only).metrics.goodput >= threshold) a = mid;
      else b = mid;
    }
    res.collapse_edge = std::exp(a);
  }
  res.stability_margin = res.collapse_edge / res.beta_star;
  return res;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string percentile_label(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q * 100.0);
  return std::string("paoii_p") + buf;
}

inline std::vector<std::string> csv_header(const std::vector<double>& percentiles) {
  std::vector<std::string> h{"n_sensors", "lambda", "alpha", "beta", "eps", "psi",
                             "energy_per_slot_J", "slot_duration_s", "goodput_pkt_per_slot",
                             "power_W"};
  for (double q : percentiles) h.push_back(percentile_label(q) + "_slots");
  for (double q : percentiles) h.push_back(percentile_label(q) + "_s");
  for (const char* c : {"tail_bound", "engine", "wall_ms", "status"}) h.emplace_back(c);
  return h;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, const std::vector<double>& percentiles) {
  const auto header = csv_header(percentiles);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    const auto& p = r.params;
    os << p.n_sensors << ',' << format_double(p.lambda) << ',' << format_double(p.alpha) << ','
       << format_double(p.beta) << ',' << format_double(p.eps) << ',' << format_double(p.psi) << ','
       << format_double(p.energy_per_slot) << ',' << format_double(p.slot_duration) << ','
       << format_double(r.goodput) << ',' << format_double(r.power);
    for (double s : r.paoii_slots) os << ',' << format_double(s);
    for (std::size_t i = 0; i < r.paoii_slots.size(); ++i) os << ',' << format_double(r.paoii_seconds(i));
    os << ',' << format_double(r.tail_bound) << ',' << r.engine << ',' << format_double(r.wall_ms) << ','
       << csv_escape(r.status) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
  return v;
}

}  // namespace detail

// Inverse of write_csv; percentiles are recovered from the header.
inline std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("read_csv: missing header");
  const auto header = detail::split_csv_line(line);
  const std::size_t fixed = 10, trailing = 4;
  if (header.size() < fixed + trailing || (header.size() - fixed - trailing) % 2 != 0)
    throw ConfigError("read_csv: unexpected header");
  const std::size_t nq = (header.size() - fixed - trailing) / 2;
  std::vector<double> qs;
  for (std::size_t i = 0; i < nq; ++i) {
    const auto& h = header[fixed + i];
    const auto start = std::string("paoii_p").size();
    qs.push_back(detail::parse_double(h.substr(start, h.size() - start - std::string("_slots").size())) / 100.0);
  }
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != header.size()) throw ConfigError("read_csv: ragged row");
    ResultRow r;
    auto& p = r.params;
    p.n_sensors = std::stoi(f[0]);
    p.lambda = detail::parse_double(f[1]);
    p.alpha = detail::parse_double(f[2]);
    p.beta = detail::parse_double(f[3]);
    p.eps = detail::parse_double(f[4]);
    p.psi = detail::parse_double(f[5]);
    p.energy_per_slot = detail::parse_double(f[6]);
    p.slot_duration = detail::parse_double(f[7]);
    r.goodput = detail::parse_double(f[8]);
    r.power = detail::parse_double(f[9]);
    r.quantiles = qs;
    for (std::size_t i = 0; i < nq; ++i) r.paoii_slots.push_back(detail::parse_double(f[fixed + i]));
    const std::size_t t = fixed + 2 * nq;
    r.tail_bound = detail::parse_double(f[t]);
    r.engine = f[t + 1];
    r.wall_ms = detail::parse_double(f[t + 2]);
    r.status = f[t + 3];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::json to_json(const SystemParams& p) {
  return {{"n_sensors", p.n_sensors}, {"lambda", p.lambda}, {"alpha", p.alpha}, {"beta", p.beta},
          {"eps", p.eps}, {"psi", p.psi}, {"energy_per_slot", p.energy_per_slot},
          {"slot_duration", p.slot_duration}};
}

inline nlohmann::json to_json(const ResultRow& r, bool with_distribution = true) {
  nlohmann::json pct = nlohmann::json::array();
  for (std::size_t i = 0; i < r.quantiles.size(); ++i)
    pct.push_back({{"q", r.quantiles[i]}, {"slots", json_number(r.paoii_slots[i])},
                   {"seconds", json_number(r.paoii_seconds(i))}});
  nlohmann::json j = {{"params", to_json(r.params)}, {"goodput", json_number(r.goodput)},
                      {"power_W", json_number(r.power)}, {"percentiles", pct},
                      {"tail_bound", json_number(r.tail_bound)}, {"engine", r.engine},
                      {"wall_ms", r.wall_ms}, {"status", r.status}};
  if (with_distribution && !r.distribution.empty())
    j[r.engine == "simulated" ? "ecdf" : "pmf"] = r.distribution;
  return j;
}

inline void write_json(std::ostream& os, const std::vector<ResultRow>& rows) {
  nlohmann::json j = {{"rows", nlohmann::json::array()}};
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  os << j.dump(1) << '\n';
}

inline nlohmann::json to_json(const ValidationReport& v) {
  return {{"params", to_json(v.params)},
          {"samples", v.samples},
          {"replications", v.replications},
          {"sup_distance", v.dkw.distance},
          {"argmax_slot", v.dkw.argmax},
          {"mu", v.dkw.mu},
          {"delta", v.dkw.delta},
          {"bound_probability", v.bound_probability},
          {"pass", v.dkw.pass},
          {"analytic_goodput", v.analytic_goodput},
          {"simulated_goodput", v.simulated_goodput},
          {"goodput_stderr", json_number(v.goodput_stderr)},
          {"analytic_power_W", v.analytic_power},
          {"simulated_power_W", v.simulated_power},
          {"power_stderr", json_number(v.power_stderr)},
          {"analytic_tail_bound", v.analytic_tail}};
}

inline nlohmann::json to_json(const OptimizeResult& o) {
  auto grid = [](const std::vector<BetaGridPoint>& pts) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& g : pts)
      a.push_back({{"beta", g.beta}, {"objective_slots", json_number(g.objective)}, {"goodput", g.goodput}});
    return a;
  };
  return {{"beta_star", o.beta_star},
          {"objective_slots", json_number(o.objective)},
          {"collapse_edge", o.collapse_edge},
          {"plateau_goodput", o.plateau_goodput},
          {"stability_margin", o.stability_margin},
          {"multi_minima", o.multi_minima},
          {"row", to_json(o.row, false)},
          {"grid", grid(o.grid)},
          {"refinements", grid(o.refinements)}};
}

}  // namespace paoii
