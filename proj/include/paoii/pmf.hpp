#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "tagged.hpp"

namespace paoii {

// Truncated PMF of the peak AoII theta; mass[t - 1] = P(theta = t).
struct PaoiiPmf {
  std::vector<double> mass;
  double tail_bound = 1.0;   // probability not yet accounted for at the horizon
  std::size_t t_max = 0;     // configured horizon
  double slot_duration = 0.0;
  bool tail_reached = false; // false: horizon hit before tail < tail_tol

  std::size_t horizon() const { return mass.size(); }
  double cumulative() const { return 1.0 - tail_bound; }

  std::vector<double> cdf() const {
    std::vector<double> out(mass.size());
    std::partial_sum(mass.begin(), mass.end(), out.begin());
    return out;
  }
};

// Sequential (active, backoff) posterior recursion for one tagged anomaly.
class TaggedRecursion {
 public:
  TaggedRecursion(const TaggedModel& model, std::vector<double> act, std::vector<double> bk)
      : model_(&model), act_(std::move(act)), bk_(std::move(bk)) {}

  std::size_t step_index() const { return t_; }
  const std::vector<double>& active() const { return act_; }
  const std::vector<double>& backoff() const { return bk_; }

  // P(theta >= t) for the current step t.
  double remaining() const {
    long double r = 0.0L;
    for (double x : act_) r += x;
    for (double x : bk_) r += x;
    return static_cast<double>(r);
  }

  // Returns P(theta = t) and advances to t + 1.
  double step() {
    const auto& s = model_->success();
    const auto& tr = model_->transitions();
    long double p = 0.0L;
    for (std::size_t i = 0; i < act_.size(); ++i) p += act_[i] * s.eta[i] + bk_[i] * s.nu[i];
    std::vector<double> next_bk = tr.w.left_multiply(bk_);
    tr.v.left_multiply_add(act_, next_bk);
    act_ = tr.u.left_multiply(act_);
    bk_ = std::move(next_bk);
    ++t_;
    return static_cast<double>(p);
  }

 private:
  const TaggedModel* model_;
  std::vector<double> act_;
  std::vector<double> bk_;
  std::size_t t_ = 1;
};

struct PmfOptions {
  std::size_t t_max = 10000;
  double tail_tol = 1e-9;
};

inline PaoiiPmf paoii_pmf(const StateSpace& space, const StationaryDistribution& pi,
                          const SystemParams& params, const TaggedModel& model,
                          const PmfOptions& opt = {}) {
  if (opt.t_max < 1) throw DomainError("paoii_pmf: t_max must be >= 1");
  const auto post = anomaly_posterior(space, pi, params);
  auto [act, bk] = model.initial(space, post);
  TaggedRecursion rec(model, std::move(act), std::move(bk));
  PaoiiPmf out;
  out.t_max = opt.t_max;
  out.slot_duration = params.slot_duration;
  out.mass.reserve(std::min<std::size_t>(opt.t_max, 4096));
  while (out.mass.size() < opt.t_max) {
    out.mass.push_back(rec.step());
    out.tail_bound = rec.remaining();
    if (out.tail_bound < opt.tail_tol) {
      out.tail_reached = true;
      break;
    }
  }
  return out;
}

inline PaoiiPmf paoii_pmf(const StateSpace& space, const StationaryDistribution& pi,
                          const SystemParams& params, const PmfOptions& opt = {}) {
  return paoii_pmf(space, pi, params, TaggedModel(params), opt);
}

// Smallest t with P(theta <= t) >= q.
inline std::size_t paoii_quantile(const PaoiiPmf& pmf, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("paoii_quantile: q must lie in (0,1)");
  double cum = 0.0;
  for (std::size_t t = 0; t < pmf.mass.size(); ++t) {
    cum += pmf.mass[t];
    if (cum >= q) return t + 1;
  }
  throw DomainError("paoii_quantile: q = " + std::to_string(q) +
                    " exceeds certified cumulative mass " + std::to_string(cum));
}

// Continuous quantile obtained by linear interpolation of the CDF between
// integer slots; used as a smooth optimisation objective.
inline double paoii_quantile_interpolated(const PaoiiPmf& pmf, double q) {
  const std::size_t t = paoii_quantile(pmf, q);
  double below = 0.0;
  for (std::size_t u = 0; u + 1 < t; ++u) below += pmf.mass[u];
  const double p = pmf.mass[t - 1];
  return static_cast<double>(t - 1) + (p > 0.0 ? (q - below) / p : 1.0);
}

}  // namespace paoii
