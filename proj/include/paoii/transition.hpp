#pragma once

#include "events.hpp"
#include "sparse.hpp"
#include "state_space.hpp"

namespace paoii {

// Row-stochastic one-slot transition matrix of the (a, c, m) chain.
using TransitionMatrix = SparseMatrix;

// Forward enumeration: every state, every activation pair (i, j), every event,
// with the event probability added to the column of the resulting state.
inline TransitionMatrix build_transition_matrix(const StateSpace& space, const EventKernel& kernel) {
  if (kernel.nodes() != space.nodes())
    throw DomainError("build_transition_matrix: kernel and space disagree on node count");
  TransitionMatrix m(space.size());
  RowAccumulator row(space.size());
  for (const auto& s : space) {
    kernel.for_each_event(s, [&](const EventCase& e, long double p) {
      if (p != 0.0L) row.add(space.index(e.apply(s)), p);
    });
    row.flush_into(m);
  }
  return m;
}

inline TransitionMatrix build_transition_matrix(const StateSpace& space, const SystemParams& params) {
  return build_transition_matrix(space, EventKernel(params, space.nodes()));
}

}  // namespace paoii
