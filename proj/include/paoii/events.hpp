#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "binomial.hpp"
#include "params.hpp"
#include "state_space.hpp"

namespace paoii {

// One-slot outcome classes of the full system.
//   A/B: an active node succeeds, ACK delivered / lost
//   C/D: a collided node succeeds, ACK delivered / lost
//   E/F: a mistaken node succeeds (stale), ACK delivered / lost
//   G:   silence
//   H:   collision with k active transmitters
//   I:   lone active transmitter hit by an uplink error
//   J:   lone backoff transmitter hit by an uplink error
enum class EventKind { A, B, C, D, E, F, G, H, I, J };

inline constexpr std::array<EventKind, 10> kAllEventKinds = {
    EventKind::A, EventKind::B, EventKind::C, EventKind::D, EventKind::E,
    EventKind::F, EventKind::G, EventKind::H, EventKind::I, EventKind::J};

inline std::string_view to_string(EventKind kind) {
  constexpr std::array<std::string_view, 10> names = {"A", "B", "C", "D", "E",
                                                      "F", "G", "H", "I", "J"};
  return names[static_cast<std::size_t>(kind)];
}

struct StateDelta {
  int da = 0;
  int dc = 0;
  int dm = 0;
};

// An event together with its activation counts: i idle nodes and j mistaken
// nodes detect an anomaly; k active nodes take part in a collision (H only).
struct EventCase {
  EventKind kind = EventKind::G;
  int i = 0;
  int j = 0;
  int k = 0;

  // (d_a, d_c, d_m). Mistaken-node bookkeeping follows the protocol diagram:
  // D turns the collided sender into a mistaken node, E removes the mistaken
  // sender, I moves the failed active sender to collided.
  StateDelta delta() const {
    switch (kind) {
      case EventKind::A: return {i - 1, j, -j};
      case EventKind::B: return {i - 1, j, -j + 1};
      case EventKind::C: return {i, j - 1, -j};
      case EventKind::D: return {i, j - 1, -j + 1};
      case EventKind::E: return {i, j, -j - 1};
      case EventKind::F: return {i, j, -j};
      case EventKind::G: return {i, j, -j};
      case EventKind::H: return {i - k, j + k, -j};
      case EventKind::I: return {i - 1, j + 1, -j};
      case EventKind::J: return {i, j, -j};
    }
    return {};
  }

  SystemState apply(const SystemState& s) const {
    const auto d = delta();
    return {s.a + d.da, s.c + d.dc, s.m + d.dm};
  }
};

// Event-probability kernels for a population of n nodes, with the binomial
// tables for lambda, alpha and beta cached up to n.
class EventKernel {
 public:
  explicit EventKernel(const SystemParams& params) : EventKernel(params, params.n_sensors) {}

  EventKernel(const SystemParams& params, int n_nodes)
      : params_(params),
        n_(n_nodes),
        bin_lambda_(n_nodes, params.lambda),
        bin_alpha_(n_nodes, params.alpha),
        bin_beta_(n_nodes, params.beta) {
    params.validate();
    if (n_nodes < 0) throw DomainError("EventKernel: node count must be >= 0");
  }

  const SystemParams& params() const { return params_; }
  int nodes() const { return n_; }
  const BinomialTable& bin_lambda() const { return bin_lambda_; }
  const BinomialTable& bin_alpha() const { return bin_alpha_; }
  const BinomialTable& bin_beta() const { return bin_beta_; }

  // zeta_s^(i,j): i of the idle and j of the mistaken nodes detect an anomaly.
  long double activation_pmf(const SystemState& s, int i, int j) const {
    const int idle = s.idle(n_);
    if (i < 0 || i > idle || j < 0 || j > s.m)
      throw DomainError("activation_pmf: (i,j) outside [0,I]x[0,m]");
    return bin_lambda_(idle, i) * bin_lambda_(s.m, j);
  }

  // Success probability of one specific active node among a active and b backoff.
  long double success_active(int a, int b) const {
    if (a < 1) throw DomainError("success_prob_active: needs a >= 1");
    if (b < 0) throw DomainError("success_prob_active: needs b >= 0");
    return (1.0L - params_.eps) * params_.alpha * bin_alpha_.none(a - 1) * bin_beta_.none(b);
  }

  // Success probability of one specific backoff node among a active and b backoff.
  long double success_backoff(int a, int b) const {
    if (b < 1) throw DomainError("success_prob_backoff: needs b >= 1");
    if (a < 0) throw DomainError("success_prob_backoff: needs a >= 0");
    return (1.0L - params_.eps) * bin_alpha_.none(a) * params_.beta * bin_beta_.none(b - 1);
  }

  bool feasible(const SystemState& s, const EventCase& e) const {
    if (e.i < 0 || e.i > s.idle(n_) || e.j < 0 || e.j > s.m) return false;
    const int act = s.a + e.i;
    const int bk = s.c + s.m;
    switch (e.kind) {
      case EventKind::A:
      case EventKind::B:
      case EventKind::I: return act >= 1;
      case EventKind::C:
      case EventKind::D: return s.c + e.j >= 1;
      case EventKind::E:
      case EventKind::F: return s.m - e.j >= 1;
      case EventKind::G: return true;
      case EventKind::H: return e.k >= 0 && e.k <= act && e.k + bk >= 2;
      case EventKind::J: return bk >= 1;
    }
    return false;
  }

  // p^kappa_{i,j}(s), or p^H_{i,j,k}(s) for collisions.
  long double event_prob(const SystemState& s, const EventCase& e) const {
    if (!feasible(s, e)) throw DomainError("event_prob: infeasible event for state");
    return event_prob_unchecked(s, e);
  }

  // Visits every feasible event of state s as f(EventCase, probability).
  template <typename Visitor>
  void for_each_event(const SystemState& s, Visitor&& f) const {
    const int idle = s.idle(n_);
    for (int i = 0; i <= idle; ++i) {
      for (int j = 0; j <= s.m; ++j) {
        const long double zeta = bin_lambda_(idle, i) * bin_lambda_(s.m, j);
        if (zeta == 0.0L) continue;
        visit_slot(s, i, j, zeta, f);
      }
    }
  }

 private:
  long double event_prob_unchecked(const SystemState& s, const EventCase& e) const {
    const long double zeta = activation_pmf(s, e.i, e.j);
    const int act = s.a + e.i;
    const int bk = s.c + s.m;
    const long double ack = 1.0L - params_.psi;
    const long double lost = params_.psi;
    switch (e.kind) {
      case EventKind::A: return ack * act * success_active(act, bk) * zeta;
      case EventKind::B: return lost * act * success_active(act, bk) * zeta;
      case EventKind::C: return ack * (s.c + e.j) * success_backoff(act, bk) * zeta;
      case EventKind::D: return lost * (s.c + e.j) * success_backoff(act, bk) * zeta;
      case EventKind::E: return ack * (s.m - e.j) * success_backoff(act, bk) * zeta;
      case EventKind::F: return lost * (s.m - e.j) * success_backoff(act, bk) * zeta;
      case EventKind::G: return bin_alpha_.none(act) * bin_beta_.none(bk) * zeta;
      case EventKind::H: return collision_weight(act, bk, e.k) * zeta;
      case EventKind::I: return params_.eps * bin_alpha_(act, 1) * bin_beta_.none(bk) * zeta;
      case EventKind::J: return params_.eps * bin_alpha_.none(act) * bin_beta_(bk, 1) * zeta;
    }
    return 0.0L;
  }

  // Bin_alpha^act(k) * sum_{l >= max(0, 2-k)} Bin_beta^bk(l)
  long double collision_weight(int act, int bk, int k) const {
    long double tail = 0.0L;
    for (int l = std::max(0, 2 - k); l <= bk; ++l) tail += bin_beta_(bk, l);
    return bin_alpha_(act, k) * tail;
  }

  template <typename Visitor>
  void visit_slot(const SystemState& s, int i, int j, long double zeta, Visitor& f) const {
    const int act = s.a + i;
    const int bk = s.c + s.m;
    const long double ack = 1.0L - params_.psi;
    const long double lost = params_.psi;
    if (act >= 1) {
      const long double win = act * success_active(act, bk) * zeta;
      f(EventCase{EventKind::A, i, j, 0}, ack * win);
      f(EventCase{EventKind::B, i, j, 0}, lost * win);
      f(EventCase{EventKind::I, i, j, 0},
        params_.eps * bin_alpha_(act, 1) * bin_beta_.none(bk) * zeta);
    }
    if (bk >= 1) {
      const long double win = success_backoff(act, bk) * zeta;
      if (s.c + j >= 1) {
        f(EventCase{EventKind::C, i, j, 0}, ack * (s.c + j) * win);
        f(EventCase{EventKind::D, i, j, 0}, lost * (s.c + j) * win);
      }
      if (s.m - j >= 1) {
        f(EventCase{EventKind::E, i, j, 0}, ack * (s.m - j) * win);
        f(EventCase{EventKind::F, i, j, 0}, lost * (s.m - j) * win);
      }
      f(EventCase{EventKind::J, i, j, 0},
        params_.eps * bin_alpha_.none(act) * bin_beta_(bk, 1) * zeta);
    }
    f(EventCase{EventKind::G, i, j, 0}, bin_alpha_.none(act) * bin_beta_.none(bk) * zeta);
    for (int k = std::max(0, 2 - bk); k <= act; ++k)
      f(EventCase{EventKind::H, i, j, k}, collision_weight(act, bk, k) * zeta);
  }

  SystemParams params_;
  int n_;
  BinomialTable bin_lambda_;
  BinomialTable bin_alpha_;
  BinomialTable bin_beta_;
};

// Free-function forms over the full N-node population.
inline double activation_pmf(const SystemParams& params, const SystemState& s, int i, int j) {
  return static_cast<double>(EventKernel(params).activation_pmf(s, i, j));
}

inline double success_prob_active(int a, int b, const SystemParams& params) {
  return static_cast<double>(EventKernel(params, std::max(a, b)).success_active(a, b));
}

inline double success_prob_backoff(int a, int b, const SystemParams& params) {
  return static_cast<double>(EventKernel(params, std::max(a, b)).success_backoff(a, b));
}

inline double event_prob(const SystemParams& params, const SystemState& s, const EventCase& e) {
  return static_cast<double>(EventKernel(params).event_prob(s, e));
}

}  // namespace paoii
