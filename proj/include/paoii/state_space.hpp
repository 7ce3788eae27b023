#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace paoii {

// Compact system state: counts of active, collided and mistaken sensors.
struct SystemState {
  int a = 0;
  int c = 0;
  int m = 0;

  int backoff() const { return c + m; }
  int idle(int n) const { return n - a - c - m; }

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

// All feasible states for a population of n nodes, ordered lexicographically
// in (a, c, m). Index lookup is O(1) through a dense (n+1)^3 table.
class StateSpace {
 public:
  explicit StateSpace(int n_nodes) : n_(n_nodes) {
    if (n_nodes < 0) throw DomainError("StateSpace: node count must be >= 0");
    states_.reserve(cardinality(n_nodes));
    for (int a = 0; a <= n_; ++a)
      for (int c = 0; a + c <= n_; ++c)
        for (int m = 0; a + c + m <= n_; ++m) states_.push_back({a, c, m});
    const auto w = static_cast<std::size_t>(n_ + 1);
    lookup_.assign(w * w * w, 0);
    for (std::size_t i = 0; i < states_.size(); ++i) lookup_[slot(states_[i])] = i;
  }

  static std::size_t cardinality(int n) {
    const auto k = static_cast<std::size_t>(n);
    return (k + 1) * (k + 2) * (k + 3) / 6;
  }

  int nodes() const { return n_; }
  std::size_t size() const { return states_.size(); }
  const SystemState& operator[](std::size_t idx) const { return states_[idx]; }
  const std::vector<SystemState>& states() const { return states_; }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  bool contains(const SystemState& s) const {
    return s.a >= 0 && s.c >= 0 && s.m >= 0 && s.a + s.c + s.m <= n_;
  }

  // Row index of a feasible state.
  std::size_t index(const SystemState& s) const {
    if (!contains(s)) throw DomainError("StateSpace::index: infeasible state");
    return lookup_[slot(s)];
  }

 private:
  std::size_t slot(const SystemState& s) const {
    const auto w = static_cast<std::size_t>(n_ + 1);
    return (static_cast<std::size_t>(s.a) * w + static_cast<std::size_t>(s.c)) * w +
           static_cast<std::size_t>(s.m);
  }

  int n_;
  std::vector<SystemState> states_;
  std::vector<std::size_t> lookup_;
};

inline StateSpace enumerate_states(const SystemParams& params) {
  params.validate();
  return StateSpace(params.n_sensors);
}

}  // namespace paoii
