#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace paoii {

// Compressed sparse row matrix with double entries; rows are built in order.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t n) : n_(n) { row_ptr_.reserve(n + 1); row_ptr_.push_back(0); }

  std::size_t size() const { return n_; }
  std::size_t rows_built() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nonzeros() const { return values_.size(); }

  // Appends the next row; columns must be strictly increasing.
  void push_row(std::span<const std::size_t> cols, std::span<const double> vals) {
    if (rows_built() >= n_) throw std::logic_error("SparseMatrix: too many rows");
    cols_.insert(cols_.end(), cols.begin(), cols.end());
    values_.insert(values_.end(), vals.begin(), vals.end());
    row_ptr_.push_back(values_.size());
  }

  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  double at(std::size_t r, std::size_t c) const {
    const auto cols = row_cols(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
  }

  double row_sum(std::size_t r) const {
    double s = 0.0;
    for (double v : row_values(r)) s += v;
    return s;
  }

  // y = x * M, accumulated in a fixed row order.
  std::vector<double> left_multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    left_multiply_add(x, y);
    return y;
  }

  // y += x * M
  void left_multiply_add(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < n_; ++r) {
      const double xr = x[r];
      if (xr == 0.0) continue;
      const auto cols = row_cols(r);
      const auto vals = row_values(r);
      for (std::size_t e = 0; e < cols.size(); ++e) y[cols[e]] += xr * vals[e];
    }
  }

  // y = M * x
  std::vector<double> right_multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
      const auto cols = row_cols(r);
      const auto vals = row_values(r);
      double acc = 0.0;
      for (std::size_t e = 0; e < cols.size(); ++e) acc += vals[e] * x[cols[e]];
      y[r] = acc;
    }
    return y;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

// Dense scratch row that remembers which columns were touched, so that the
// emitted sparse row is sorted and independent of accumulation order of
// distinct columns.
class RowAccumulator {
 public:
  explicit RowAccumulator(std::size_t n) : acc_(n, 0.0L), seen_(n, false) {}

  void add(std::size_t col, long double v) {
    if (!seen_[col]) {
      seen_[col] = true;
      touched_.push_back(col);
    }
    acc_[col] += v;
  }

  long double get(std::size_t col) const { return acc_[col]; }

  // Touched columns in insertion order.
  const std::vector<std::size_t>& columns() const { return touched_; }

  void reset() {
    for (std::size_t c : touched_) {
      acc_[c] = 0.0L;
      seen_[c] = false;
    }
    touched_.clear();
  }

  // Emits the row into m (dropping exact zeros) and resets.
  void flush_into(SparseMatrix& m) {
    std::sort(touched_.begin(), touched_.end());
    cols_.clear();
    vals_.clear();
    for (std::size_t c : touched_) {
      if (acc_[c] != 0.0L) {
        cols_.push_back(c);
        vals_.push_back(static_cast<double>(acc_[c]));
      }
      acc_[c] = 0.0L;
      seen_[c] = false;
    }
    touched_.clear();
    m.push_row(cols_, vals_);
  }

 private:
  std::vector<long double> acc_;
  std::vector<bool> seen_;
  std::vector<std::size_t> touched_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

}  // namespace paoii
