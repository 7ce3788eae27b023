#pragma once

#include <chrono>

#include "metrics.hpp"
#include "pmf.hpp"

namespace paoii {

struct AnalysisOptions {
  StationaryOptions stationary;
  PmfOptions pmf;
  bool compute_pmf = true;
};

struct AnalysisResult {
  SystemParams params;
  StationaryDistribution pi;
  MetricsReport metrics;
  PaoiiPmf pmf;         // empty when lambda = 0 or compute_pmf is off
  double wall_ms = 0.0;
};

// Full analytic pipeline: transition matrix, stationary distribution,
// goodput/power and the peak-AoII PMF.
inline AnalysisResult analyze(const SystemParams& params, const AnalysisOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  const StateSpace space(params.n_sensors);
  const EventKernel kernel(params);
  const auto m = build_transition_matrix(space, kernel);
  AnalysisResult out;
  out.params = params;
  out.pi = solve_stationary(m, params.lambda, opt.stationary);
  out.metrics = evaluate_metrics(space, out.pi, kernel);
  if (opt.compute_pmf && params.lambda > 0.0)
    out.pmf = paoii_pmf(space, out.pi, params, opt.pmf);
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace paoii
