#pragma once

#include <cstddef>
#include <vector>

#include "params.hpp"

namespace paoii {

// Pascal triangle in extended precision, rows 0..n_max.
class PascalTable {
 public:
  explicit PascalTable(int n_max) : n_max_(n_max), rows_(static_cast<std::size_t>(n_max) + 1) {
    for (int n = 0; n <= n_max; ++n) {
      auto& row = rows_[static_cast<std::size_t>(n)];
      row.assign(static_cast<std::size_t>(n) + 1, 1.0L);
      for (int k = 1; k < n; ++k) {
        const auto& prev = rows_[static_cast<std::size_t>(n) - 1];
        row[static_cast<std::size_t>(k)] =
            prev[static_cast<std::size_t>(k) - 1] + prev[static_cast<std::size_t>(k)];
      }
    }
  }

  long double choose(int n, int k) const {
    if (n < 0 || n > n_max_ || k < 0 || k > n) return 0.0L;
    return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
  }

  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<std::vector<long double>> rows_;
};

// Binomial PMF Bin_p^n(k) tabulated for all 0 <= k <= n <= n_max.
class BinomialTable {
 public:
  BinomialTable(int n_max, double p) : p_(p), pmf_(static_cast<std::size_t>(n_max) + 1) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("BinomialTable: p must lie in [0,1]");
    const PascalTable pascal(n_max);
    const long double pl = p;
    const long double ql = 1.0L - pl;
    std::vector<long double> pw(static_cast<std::size_t>(n_max) + 1, 1.0L);
    std::vector<long double> qw(static_cast<std::size_t>(n_max) + 1, 1.0L);
    for (std::size_t e = 1; e < pw.size(); ++e) {
      pw[e] = pw[e - 1] * pl;
      qw[e] = qw[e - 1] * ql;
    }
    for (int n = 0; n <= n_max; ++n) {
      auto& row = pmf_[static_cast<std::size_t>(n)];
      row.resize(static_cast<std::size_t>(n) + 1);
      for (int k = 0; k <= n; ++k)
        row[static_cast<std::size_t>(k)] = pascal.choose(n, k) * pw[static_cast<std::size_t>(k)] *
                                           qw[static_cast<std::size_t>(n - k)];
    }
  }

  // Zero outside 0 <= k <= n.
  long double operator()(int n, int k) const {
    if (n < 0 || n >= static_cast<int>(pmf_.size()) || k < 0 || k > n) return 0.0L;
    return pmf_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
  }

  // (1 - p)^n
  long double none(int n) const { return (*this)(n, 0); }

  double p() const { return p_; }
  int n_max() const { return static_cast<int>(pmf_.size()) - 1; }

 private:
  double p_;
  std::vector<std::vector<long double>> pmf_;
};

}  // namespace paoii
