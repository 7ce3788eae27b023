#pragma once

#include "events.hpp"
#include "stationary.hpp"

namespace paoii {

struct MetricsReport {
  double goodput = 0.0;  // novel packets per slot
  double power = 0.0;    // watts per node
  double mean_active = 0.0;
  double mean_collided = 0.0;
  double mean_mistaken = 0.0;
  double mean_idle = 0.0;
};

// Expected novel deliveries per slot: events A, B, C and D. Stale successes
// (E, F) carry no new information.
inline double goodput(const StateSpace& space, const StationaryDistribution& pi,
                      const EventKernel& kernel) {
  long double g = 0.0L;
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    if (pi[idx] == 0.0) continue;
    long double novel = 0.0L;
    kernel.for_each_event(space[idx], [&](const EventCase& e, long double p) {
      switch (e.kind) {
        case EventKind::A:
        case EventKind::B:
        case EventKind::C:
        case EventKind::D: novel += p; break;
        default: break;
      }
    });
    g += pi[idx] * novel;
  }
  return static_cast<double>(g);
}

// Per-node power: expected number of transmitters per slot times E / (N tau).
// Activations within the slot contribute their expectation I * lambda.
inline double power(const StateSpace& space, const StationaryDistribution& pi,
                    const SystemParams& params) {
  const int n = space.nodes();
  long double tx = 0.0L;
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const auto& s = space[idx];
    const long double active = s.a + static_cast<long double>(s.idle(n)) * params.lambda;
    tx += pi[idx] * (s.backoff() * static_cast<long double>(params.beta) + active * params.alpha);
  }
  return static_cast<double>(tx * params.energy_per_slot / (n * params.slot_duration));
}

inline MetricsReport evaluate_metrics(const StateSpace& space, const StationaryDistribution& pi,
                                      const EventKernel& kernel) {
  MetricsReport r;
  r.goodput = goodput(space, pi, kernel);
  r.power = power(space, pi, kernel.params());
  long double ea = 0.0L, ec = 0.0L, em = 0.0L, ei = 0.0L;
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const auto& s = space[idx];
    ea += pi[idx] * s.a;
    ec += pi[idx] * s.c;
    em += pi[idx] * s.m;
    ei += pi[idx] * s.idle(space.nodes());
  }
  r.mean_active = static_cast<double>(ea);
  r.mean_collided = static_cast<double>(ec);
  r.mean_mistaken = static_cast<double>(em);
  r.mean_idle = static_cast<double>(ei);
  return r;
}

}  // namespace paoii
