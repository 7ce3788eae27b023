#include <gtest/gtest.h>

#include "paoii/analysis.hpp"
#include "paoii/simulator.hpp"

using namespace paoii;

namespace {

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

AnalysisOptions metrics_only() {
  AnalysisOptions o;
  o.compute_pmf = false;
  return o;
}

}  // namespace

TEST(Goodput, ZeroWithoutArrivals) {
  const auto r = analyze(make(5, 0.0, 0.9, 0.1, 0.1, 0.1), metrics_only());
  EXPECT_EQ(r.metrics.goodput, 0.0);
  EXPECT_EQ(r.metrics.power, 0.0);
}

TEST(Goodput, FlowBalanceAndBounds) {
  for (int n : {1, 3, 5}) {
    for (double beta : {0.02, 0.1, 0.5}) {
      for (double psi : {0.0, 0.2}) {
        const auto p = make(n, 0.02, 0.9, beta, 0.1, psi);
        const auto r = analyze(p, metrics_only());
        const double clearing = p.lambda * (r.metrics.mean_idle + r.metrics.mean_mistaken);
        EXPECT_NEAR(r.metrics.goodput, clearing, 1e-9);
        EXPECT_LE(r.metrics.goodput, 1.0 - p.eps);
        EXPECT_LE(r.metrics.goodput, n * p.lambda);
        EXPECT_GE(r.metrics.power, 0.0);
        EXPECT_NEAR(r.metrics.mean_active + r.metrics.mean_collided + r.metrics.mean_mistaken +
                        r.metrics.mean_idle,
                    n, 1e-9);
      }
    }
  }
}

TEST(Power, AllActiveDegenerateState) {
  const auto p = make(4, 0.3, 0.7, 0.2, 0.1, 0.1);
  const StateSpace space(4);
  StationaryDistribution forced;
  forced.pi.assign(space.size(), 0.0);
  forced.pi[space.index({4, 0, 0})] = 1.0;
  EXPECT_NEAR(power(space, forced, p), p.energy_per_slot * p.alpha / p.slot_duration, 1e-15);
}

TEST(Power, MatchesSimulatedEnergy) {
  const auto p = make(5, 0.03, 0.8, 0.15, 0.1, 0.2);
  const auto r = analyze(p, metrics_only());
  SimulationControls ctl;
  ctl.slots_per_replication = 50000;
  ctl.workers = 1;
  const auto s = run(p, 11, 40, ctl);
  std::vector<double> per;
  for (const auto& rep : s.per_replication)
    per.push_back(static_cast<double>(rep.transmitting_slots) * p.energy_per_slot /
                  (p.n_sensors * static_cast<double>(rep.slots) * p.slot_duration));
  double mean = 0.0, var = 0.0;
  for (double x : per) mean += x;
  mean /= per.size();
  for (double x : per) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / (per.size() - 1) / per.size());
  EXPECT_NEAR(s.power(p), r.metrics.power, 3.0 * se);
}
