// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "paoii/experiments.hpp"

using namespace paoii;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

SystemParams make(int n, double lambda, double alpha, double beta, double eps, double psi) {
  SystemParams p;
  p.n_sensors = n;
  p.lambda = lambda;
  p.alpha = alpha;
  p.beta = beta;
  p.eps = eps;
  p.psi = psi;
  return p;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Analytic CDF against the simulator ECDF under the DKW bound.
void dkw_cross_validation(Verdict& v) {
  for (double beta : {0.02, 0.1}) {
    ExperimentConfig cfg;
    cfg.params = make(20, 0.01, 0.9, beta, 0.1, 0.1);
    cfg.sim.samples = 1000000;
    cfg.sim.delta = 1e-6;
    cfg.record_timing = false;
    const auto rep = run_validate(cfg);
    v.require(rep.samples == 1000000, "sample count at beta=" + fmt(beta));
    v.require(rep.dkw.distance <= rep.dkw.mu, "sup-distance at beta=" + fmt(beta));
    v.detail << (beta == 0.02 ? "" : "; ") << "beta=" << fmt(beta) << " D=" << fmt(rep.dkw.distance)
             << " mu=" << fmt(rep.dkw.mu);
  }
}

// 2. Lone node against the two-mode absorbing chain.
void lone_node_closed_form(Verdict& v) {
  const std::vector<SystemParams> sets = {
      make(1, 0.01, 0.9, 0.1, 0.1, 0.1), make(1, 0.05, 0.7, 0.3, 0.0, 0.0), make(1, 0.02, 0.9, 0.5, 0.2, 0.0),
      make(1, 0.1, 0.5, 0.05, 0.0, 0.3), make(1, 0.3, 1.0, 1.0, 0.4, 0.5), make(1, 0.001, 0.3, 0.7, 0.25, 0.9)};
  double worst = 0.0;
  for (const auto& p : sets) {
    const auto pmf = analyze(p).pmf;
    v.require(pmf.tail_reached, "tail not reached");
    const double w = oracle::single_node_idle_weight(p);
    for (std::size_t t = 1; t <= pmf.horizon(); ++t)
      worst = std::max(worst, std::abs(pmf.mass[t - 1] - oracle::single_node_pmf(p, w, static_cast<int>(t))));
  }
  v.require(worst <= 1e-12, "max |difference| " + fmt(worst));
  v.detail << sets.size() << " parameter sets, max |p - p_ref| = " << fmt(worst);
}

// 3. Goodput equals lambda times the expected number of eligible nodes.
void flow_balance(Verdict& v) {
  double worst = 0.0;
  int solved = 0;
  AnalysisOptions opt;
  opt.compute_pmf = false;
  for (int n : {1, 3, 5, 20}) {
    for (const auto& [lambda, beta, psi] :
         std::vector<std::tuple<double, double, double>>{{0.01, 0.1, 0.1}, {0.02, 0.02, 0.0}, {0.005, 0.3, 0.2}}) {
      const auto r = analyze(make(n, lambda, 0.9, beta, 0.1, psi), opt);
      const double gap = std::abs(r.metrics.goodput - lambda * (r.metrics.mean_idle + r.metrics.mean_mistaken));
      worst = std::max(worst, gap);
      ++solved;
    }
  }
  v.require(worst <= 1e-9, "flow imbalance " + fmt(worst));
  v.detail << solved << " configurations, max gap = " << fmt(worst);
}

// 4. Exhaustive joint-outcome enumeration and the piecewise transition form.
void brute_force_equivalence(Verdict& v) {
  const std::vector<SystemParams> base = {make(1, 0.2, 0.9, 0.5, 0.1, 0.1), make(1, 0.05, 1.0, 1.0, 0.0, 0.0),
                                          make(1, 0.3, 0.7, 0.4, 0.2, 0.3)};
  double worst_m = 0.0, worst_t = 0.0, worst_pw = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (auto p : base) {
      p.n_sensors = n;
      const StateSpace space(n);
      const auto m = build_transition_matrix(space, p);
      if (n <= 2) {
        const auto bf = oracle::brute_force_transition(space, p);
        for (std::size_t r = 0; r < space.size(); ++r)
          for (std::size_t c = 0; c < space.size(); ++c) worst_m = std::max(worst_m, std::abs(m.at(r, c) - bf[r][c]));
        const TaggedModel model(p);
        const auto bt = oracle::brute_force_tagged(model.others(), p);
        const auto& tr = model.transitions();
        for (std::size_t r = 0; r < model.others().size(); ++r) {
          worst_t = std::max({worst_t, std::abs(model.success().eta[r] - bt.eta[r]),
                              std::abs(model.success().nu[r] - bt.nu[r])});
          for (std::size_t c = 0; c < model.others().size(); ++c)
            worst_t = std::max({worst_t, std::abs(tr.u.at(r, c) - bt.u[r][c]), std::abs(tr.v.at(r, c) - bt.v[r][c]),
                                std::abs(tr.w.at(r, c) - bt.w[r][c])});
        }
      }
      for (std::size_t r = 0; r < space.size(); ++r)
        for (std::size_t c = 0; c < space.size(); ++c)
          worst_pw = std::max(worst_pw, std::abs(m.at(r, c) - oracle::piecewise_entry(space[r], space[c], n, p)));
    }
  }
  v.require(worst_m <= 1e-12, "M vs enumeration " + fmt(worst_m));
  v.require(worst_t <= 1e-12, "tagged model vs enumeration " + fmt(worst_t));
  v.require(worst_pw <= 1e-12, "M vs piecewise form " + fmt(worst_pw));
  v.detail << "M (N<=2) " << fmt(worst_m) << ", eta/nu/U/V/W (N<=2) " << fmt(worst_t) << ", piecewise M (N<=4) "
           << fmt(worst_pw);
}

// Number of curvature sign changes of y(x), ignoring numerically flat stretches.
int inflections(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d2;
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double s1 = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double s2 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    d2.push_back((s2 - s1) / (0.5 * (x[i + 1] - x[i - 1])));
    scale = std::max(scale, std::abs(d2.back()));
  }
  int changes = 0, sign = 0;
  for (double d : d2) {
    if (std::abs(d) < 1e-6 * scale) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) ++changes;
    sign = s;
  }
  return changes;
}

// 5. Qualitative shape of the beta trade-off.
void beta_tradeoff(Verdict& v) {
  ExperimentConfig cfg;
  cfg.params = make(20, 0.02, 0.9, 0.1, 0.1, 0.0);
  cfg.percentiles = {0.95};
  cfg.record_timing = false;
  cfg.optimize.beta_min = 0.02;
  cfg.optimize.beta_max = 0.3;
  cfg.optimize.coarse_points = 9;
  cfg.optimize.refine_iterations = 8;
  const auto clean = optimize_beta(cfg);
  cfg.params.psi = 0.2;
  const auto lossy = optimize_beta(cfg);
  const double p95_clean = clean.row.paoii_slots[0];
  const double p95_lossy = lossy.row.paoii_slots[0];
  v.require(p95_clean >= 40.0 && p95_clean <= 80.0, "min p95 at psi=0 outside 60 +/- 20 slots");
  v.require(lossy.objective > clean.objective && p95_lossy > p95_clean, "psi=0.2 minimum not larger");
  v.detail << "rho=0.4 min p95: psi=0 " << p95_clean << " slots (beta*=" << fmt(clean.beta_star) << "), psi=0.2 "
           << p95_lossy << " slots (beta*=" << fmt(lossy.beta_star) << "); ";

  AnalysisOptions metrics_only;
  metrics_only.compute_pmf = false;
  for (double lambda : {0.01, 0.02}) {
    std::vector<double> beta, goodput, power;
    const int points = 33;
    for (int i = 0; i < points; ++i) {
      auto p = make(20, lambda, 0.9, std::pow(10.0, -2.0 + 2.0 * i / (points - 1)), 0.1, 0.1);
      const auto r = analyze(p, metrics_only);
      beta.push_back(p.beta);
      goodput.push_back(r.metrics.goodput);
      power.push_back(r.metrics.power);
    }
    const auto peak = static_cast<std::size_t>(std::max_element(goodput.begin(), goodput.end()) - goodput.begin());
    const double g_max = goodput[peak];
    const int bends = inflections(beta, power);
    v.require(bends == 2, "power inflections at rho=" + fmt(20 * lambda) + " = " + std::to_string(bends));
    v.detail << "rho=" << fmt(20 * lambda) << " power inflections " << bends;
    if (lambda == 0.01) {
      // Plateau: the span of beta with G >= 0.9 max G; collapse: G(1) ~ 0 soon after.
      std::size_t lo = peak, hi = peak;
      while (lo > 0 && goodput[lo - 1] >= 0.9 * g_max) --lo;
      while (hi + 1 < goodput.size() && goodput[hi + 1] >= 0.9 * g_max) ++hi;
      std::size_t gone = hi;
      while (gone + 1 < goodput.size() && goodput[gone] > 0.1 * g_max) ++gone;
      const double plateau_span = beta[hi] / beta[lo];
      const double collapse_span = beta[gone] / beta[hi];
      v.require(plateau_span >= std::sqrt(10.0), "goodput plateau narrower than half a decade");
      v.require(goodput[gone] <= 0.1 * g_max && collapse_span <= 1.5, "goodput does not collapse sharply");
      v.require(goodput.back() <= 1e-3 * g_max, "goodput at beta=1 not near 0");
      v.detail << ", goodput within 10% of max " << fmt(g_max) << " for beta in [" << fmt(beta[lo]) << ", "
               << fmt(beta[hi]) << "], below 10% by beta=" << fmt(beta[gone]) << "; ";
    }
  }
}

// 6. Structural invariants over randomized parameters.
void invariant_fuzz(Verdict& v) {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nodes(1, 12);
  const int configs = 120;
  double worst_row = 0.0, worst_res = 0.0, worst_mass = 0.0;
  for (int trial = 0; trial < configs; ++trial) {
    const auto p = make(nodes(rng), 0.002 + 0.1 * u(rng), 0.2 + 0.8 * u(rng), 0.02 + 0.98 * u(rng), 0.4 * u(rng),
                        0.6 * u(rng));
    const StateSpace space(p.n_sensors);
    const auto m = build_transition_matrix(space, p);
    for (std::size_t r = 0; r < space.size(); ++r) worst_row = std::max(worst_row, std::abs(m.row_sum(r) - 1.0));
    const auto pi = solve_stationary(m, p.lambda);
    worst_res = std::max(worst_res, stationarity_residual(m, pi.pi));

    const TaggedModel model(p);
    auto [act, bk] = model.initial(space, anomaly_posterior(space, pi, p));
    TaggedRecursion rec(model, act, bk);
    std::vector<double> mass;
    long double cumulative = 0.0L;
    for (std::size_t t = 1; t <= 10000 && rec.remaining() > 1e-9; ++t) {
      const double pt = rec.step();
      cumulative += pt;
      mass.push_back(pt);
      worst_mass = std::max(worst_mass,
                            std::abs(rec.remaining() - static_cast<double>(1.0L - cumulative)) / static_cast<double>(t));
      v.require(pt >= 0.0, "negative probability mass");
    }
    PaoiiPmf pmf;
    pmf.mass = mass;
    pmf.tail_bound = rec.remaining();
    std::size_t prev = 0;
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999}) {
      if (q > 1.0 - pmf.tail_bound) break;
      const auto t = paoii_quantile(pmf, q);
      v.require(t >= prev, "percentile order");
      prev = t;
    }
  }
  v.require(worst_row <= 1e-12, "row sum deviation " + fmt(worst_row));
  v.require(worst_res <= 1e-10, "stationarity residual " + fmt(worst_res));
  v.require(worst_mass <= 1e-12, "mass drift per step " + fmt(worst_mass));
  v.detail << configs << " configurations, row " << fmt(worst_row) << ", residual " << fmt(worst_res)
           << ", mass drift/t " << fmt(worst_mass);
}

// 7. Full N = 20 analytic pipeline within the time budget.
void performance_budget(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = analyze(SystemParams{});
  const double secs = seconds_since(t0);
  v.require(r.pmf.tail_reached, "tail 1e-9 not reached");
  v.require(secs <= 60.0, "took " + fmt(secs) + " s");
  v.detail << "|S|=" << r.pi.pi.size() << ", horizon " << r.pmf.horizon() << " slots, " << fmt(secs) << " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
      {"dkw cross-validation", dkw_cross_validation},
      {"lone-node closed form", lone_node_closed_form},
      {"flow balance", flow_balance},
      {"brute-force equivalence", brute_force_equivalence},
      {"beta trade-off shape", beta_tradeoff},
      {"invariant fuzz", invariant_fuzz},
      {"performance budget", performance_budget},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
