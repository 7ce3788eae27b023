#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace paoii {

// Right-continuous empirical CDF over positive integer slots.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const std::uint32_t> samples) : count_(samples.size()) {
    if (samples.empty()) throw DomainError("empirical_cdf: empty sample set");
    const auto max_it = std::max_element(samples.begin(), samples.end());
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(*max_it) + 1, 0);
    for (auto s : samples) ++hist[s];
    cdf_.resize(hist.size());
    std::uint64_t acc = 0;
    for (std::size_t t = 0; t < hist.size(); ++t) {
      acc += hist[t];
      cdf_[t] = static_cast<double>(acc) / static_cast<double>(count_);
    }
  }

  // F_L(x) for real x.
  double operator()(double x) const {
    if (x < 0.0) return 0.0;
    const auto t = static_cast<std::size_t>(std::floor(x));
    return t >= cdf_.size() ? 1.0 : cdf_[t];
  }

  std::size_t sample_count() const { return count_; }
  std::size_t max_value() const { return cdf_.size() - 1; }

 private:
  std::size_t count_;
  std::vector<double> cdf_;  // cdf_[t] = F_L(t)
};

inline EmpiricalCdf empirical_cdf(std::span<const std::uint32_t> samples) { return EmpiricalCdf(samples); }

struct DkwResult {
  double distance = 0.0;  // sup_x |F_L(x) - F(x)|
  std::size_t argmax = 0;
  double mu = 0.0;        // sqrt(ln(2/delta) / (2L))
  double delta = 0.0;
  bool pass = false;
};

inline double dkw_mu(std::size_t sample_count, double delta) {
  if (sample_count == 0 || !(delta > 0.0 && delta < 1.0))
    throw DomainError("dkw_mu: need L >= 1 and delta in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(sample_count)));
}

// One-sided tail bound P(sup (F_L - F) > mu) <= exp(-2 L mu^2).
inline double dkw_bound_probability(std::size_t sample_count, double mu) {
  return std::exp(-2.0 * static_cast<double>(sample_count) * mu * mu);
}

// analytic_cdf[t - 1] = F(t) for t = 1..H; beyond H the last value is held.
// Both functions jump only at integers, so the supremum is attained at one.
inline DkwResult dkw_check(const EmpiricalCdf& ecdf, std::span<const double> analytic_cdf,
                           std::size_t sample_count, double delta) {
  DkwResult r;
  r.delta = delta;
  r.mu = dkw_mu(sample_count, delta);
  const std::size_t last = std::max(ecdf.max_value(), analytic_cdf.size());
  for (std::size_t t = 0; t <= last; ++t) {
    const double f = t == 0 || analytic_cdf.empty()
                         ? 0.0
                         : analytic_cdf[std::min(t, analytic_cdf.size()) - 1];
    const double d = std::abs(ecdf(static_cast<double>(t)) - f);
    if (d > r.distance) {
      r.distance = d;
      r.argmax = t;
    }
  }
  r.pass = r.distance <= r.mu;
  return r;
}

}  // namespace paoii
