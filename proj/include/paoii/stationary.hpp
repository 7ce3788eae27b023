#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparse.hpp"
#include "state_space.hpp"

namespace paoii {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class StationaryMethod { automatic, power_iteration, dense_direct, absorbing_idle };

struct StationaryOptions {
  StationaryMethod method = StationaryMethod::automatic;
  double tolerance = 1e-13;            // successive-iterate infinity norm
  std::size_t max_iterations = 1000000;
  std::size_t dense_limit = 2000;      // automatic picks the direct solve up to this size
  double residual_limit = 1e-10;
};

struct StationaryDistribution {
  std::vector<double> pi;
  double residual = 0.0;  // ||pi M - pi||_inf
  std::size_t iterations = 0;
  StationaryMethod method = StationaryMethod::automatic;

  double operator[](std::size_t i) const { return pi[i]; }
  std::size_t size() const { return pi.size(); }
};

inline double stationarity_residual(const SparseMatrix& m, const std::vector<double>& pi) {
  const auto next = m.left_multiply(pi);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, std::abs(next[i] - pi[i]));
  return r;
}

namespace detail {

inline void normalize(std::vector<double>& v) {
  double total = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    total += x;
  }
  if (!(total > 0.0)) throw SolverError("stationary solve produced a null vector", 1.0);
  for (double& x : v) x /= total;
}

inline StationaryDistribution power_iteration(const SparseMatrix& m, const StationaryOptions& opt) {
  const std::size_t n = m.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n);
  double delta = 1.0;
  std::size_t it = 0;
  while (it < opt.max_iterations) {
    std::fill(y.begin(), y.end(), 0.0);
    m.left_multiply_add(x, y);
    normalize(y);
    delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(y[i] - x[i]));
    x.swap(y);
    ++it;
    if (delta < opt.tolerance) break;
  }
  if (delta >= opt.tolerance)
    throw SolverError("power iteration did not converge within " +
                          std::to_string(opt.max_iterations) + " iterations",
                      stationarity_residual(m, x));
  return {x, stationarity_residual(m, x), it, StationaryMethod::power_iteration};
}

// Null space of (M^T - I) with one balance equation replaced by sum(pi) = 1.
inline StationaryDistribution dense_direct(const SparseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a = -Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto cols = m.row_cols(static_cast<std::size_t>(r));
    const auto vals = m.row_values(static_cast<std::size_t>(r));
    for (std::size_t e = 0; e < cols.size(); ++e) a(static_cast<Eigen::Index>(cols[e]), r) += vals[e];
  }
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd sol = a.partialPivLu().solve(b);
  std::vector<double> pi(sol.data(), sol.data() + n);
  normalize(pi);
  return {pi, stationarity_residual(m, pi), 1, StationaryMethod::dense_direct};
}

}  // namespace detail

// Stationary distribution of a row-stochastic matrix with a single recurrent class.
inline StationaryDistribution solve_stationary(const SparseMatrix& m,
                                               const StationaryOptions& opt = {}) {
  if (m.size() == 0) throw SolverError("empty transition matrix", 0.0);
  StationaryDistribution out;
  switch (opt.method) {
    case StationaryMethod::power_iteration:
      out = detail::power_iteration(m, opt);
      break;
    case StationaryMethod::dense_direct:
      out = detail::dense_direct(m);
      break;
    case StationaryMethod::absorbing_idle:
      out = {std::vector<double>(m.size(), 0.0), 0.0, 0, StationaryMethod::absorbing_idle};
      out.pi[0] = 1.0;
      out.residual = stationarity_residual(m, out.pi);
      break;
    case StationaryMethod::automatic:
      out = m.size() <= opt.dense_limit ? detail::dense_direct(m) : detail::power_iteration(m, opt);
      break;
  }
  if (!(out.residual <= opt.residual_limit))
    throw SolverError("stationary distribution fails the residual check", out.residual);
  return out;
}

// System-aware entry point: with lambda = 0 the chain drains into the all-idle
// state (index 0) and that point mass is returned directly.
inline StationaryDistribution solve_stationary(const SparseMatrix& m, double lambda,
                                               StationaryOptions opt = {}) {
  if (lambda == 0.0) opt.method = StationaryMethod::absorbing_idle;
  return solve_stationary(m, opt);
}

}  // namespace paoii
