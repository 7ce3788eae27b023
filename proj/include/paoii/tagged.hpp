#pragma once

#include <vector>

#include "events.hpp"
#include "stationary.hpp"
#include "transition.hpp"

namespace paoii {

// Where a freshly generated anomaly lands: p_pkt(s) is the probability that it
// is born in system state s, p_id(s) the probability that its node was idle
// (otherwise it was mistaken and starts in backoff).
struct AnomalyPosterior {
  std::vector<double> p_pkt;
  std::vector<double> p_id;
};

inline AnomalyPosterior anomaly_posterior(const StateSpace& space, const StationaryDistribution& pi,
                                          const SystemParams& params) {
  if (params.lambda == 0.0) throw DomainError("anomaly_posterior: lambda = 0 generates no anomalies");
  if (pi.size() != space.size()) throw DomainError("anomaly_posterior: pi does not match space");
  const int n = space.nodes();
  AnomalyPosterior out{std::vector<double>(space.size(), 0.0), std::vector<double>(space.size(), 0.0)};
  long double total = 0.0L;
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const auto& s = space[idx];
    const int sources = s.m + s.idle(n);
    if (sources == 0) continue;
    const long double w = static_cast<long double>(pi[idx]) * sources * params.lambda;
    out.p_pkt[idx] = static_cast<double>(w);
    out.p_id[idx] = static_cast<double>(s.idle(n)) / sources;
    total += w;
  }
  if (!(total > 0.0L)) throw DomainError("anomaly_posterior: no state admits an arrival");
  for (double& v : out.p_pkt) v = static_cast<double>(v / total);
  return out;
}

// Per-slot behaviour of one tagged node holding an unreported anomaly. The
// tagged node is tracked outside the counts: every vector and matrix here is
// indexed by the state of the other N-1 nodes.
//
//   eta(s), nu(s): tagged node (active / backoff) is delivered this slot.
//   U(s,s'): tagged node stays active, others move s -> s'.
//   V(s,s'): tagged node fails a transmission and enters backoff.
//   W(s,s'): tagged node stays in backoff without being delivered.
//
// Row sums satisfy sum(U + V) + eta = 1 and sum(W) + nu = 1.
struct TaggedSuccessVectors {
  std::vector<double> eta;
  std::vector<double> nu;
};

struct TaggedTransitions {
  SparseMatrix u;
  SparseMatrix v;
  SparseMatrix w;
};

class TaggedModel {
 public:
  explicit TaggedModel(const SystemParams& params)
      : params_(params),
        others_(params.n_sensors - 1),
        kernel_(params, params.n_sensors - 1) {
    build();
  }

  const SystemParams& params() const { return params_; }
  const StateSpace& others() const { return others_; }
  const TaggedSuccessVectors& success() const { return success_; }
  const TaggedTransitions& transitions() const { return trans_; }

  // Initial (active, backoff) distributions over the others' states for an
  // anomaly drawn from the posterior over the full N-node space.
  std::pair<std::vector<double>, std::vector<double>> initial(const StateSpace& full,
                                                              const AnomalyPosterior& post) const {
    std::vector<double> act(others_.size(), 0.0);
    std::vector<double> bk(others_.size(), 0.0);
    for (std::size_t idx = 0; idx < full.size(); ++idx) {
      const double p = post.p_pkt[idx];
      if (p == 0.0) continue;
      const auto& s = full[idx];
      const double pid = post.p_id[idx];
      if (s.idle(full.nodes()) >= 1) act[others_.index(s)] += p * pid;
      if (s.m >= 1) bk[others_.index({s.a, s.c, s.m - 1})] += p * (1.0 - pid);
    }
    return {act, bk};
  }

 private:
  void build() {
    const std::size_t n = others_.size();
    const double alpha = params_.alpha;
    const double beta = params_.beta;
    const double eps = params_.eps;
    const auto& ba = kernel_.bin_alpha();
    const auto& bb = kernel_.bin_beta();
    const auto& bl = kernel_.bin_lambda();

    success_.eta.assign(n, 0.0);
    success_.nu.assign(n, 0.0);
    trans_ = {SparseMatrix(n), SparseMatrix(n), SparseMatrix(n)};
    RowAccumulator quiet(n);  // others' own slot, tagged node silent
    RowAccumulator fail(n);   // tagged node transmits and is not delivered
    RowAccumulator u(n), v(n), w(n);

    for (std::size_t idx = 0; idx < n; ++idx) {
      const auto& s = others_[idx];
      const int idle = s.idle(others_.nodes());
      const int bk = s.backoff();
      kernel_.for_each_event(s, [&](const EventCase& e, long double p) {
        if (p != 0.0L) quiet.add(others_.index(e.apply(s)), p);
      });
      long double alone = 0.0L;
      for (int i = 0; i <= idle; ++i) {
        for (int j = 0; j <= s.m; ++j) {
          const long double zeta = bl(idle, i) * bl(s.m, j);
          if (zeta == 0.0L) continue;
          const int act = s.a + i;
          const long double silent = ba.none(act) * bb.none(bk);
          alone += zeta * silent;
          // Lone tagged transmission lost to an uplink error.
          fail.add(others_.index({act, s.c + j, s.m - j}), zeta * silent * eps);
          // Collision with k active and at least one transmitter overall.
          for (int k = 0; k <= act; ++k) {
            const long double pk = k == 0 ? ba.none(act) * (1.0L - bb.none(bk)) : ba(act, k);
            if (pk == 0.0L) continue;
            fail.add(others_.index({act - k, s.c + j + k, s.m - j}), zeta * pk);
          }
        }
      }
      success_.eta[idx] = static_cast<double>(alpha * (1.0L - eps) * alone);
      success_.nu[idx] = static_cast<double>(beta * (1.0L - eps) * alone);

      for (std::size_t col : quiet.columns()) {
        const long double q = quiet.get(col);
        u.add(col, (1.0L - alpha) * q);
        w.add(col, (1.0L - beta) * q);
      }
      for (std::size_t col : fail.columns()) {
        const long double f = fail.get(col);
        v.add(col, alpha * f);
        w.add(col, beta * f);
      }
      quiet.reset();
      fail.reset();
      u.flush_into(trans_.u);
      v.flush_into(trans_.v);
      w.flush_into(trans_.w);
    }
  }

  SystemParams params_;
  StateSpace others_;
  EventKernel kernel_;
  TaggedSuccessVectors success_;
  TaggedTransitions trans_;
};

inline TaggedSuccessVectors tagged_success_vectors(const SystemParams& params) {
  return TaggedModel(params).success();
}

inline TaggedTransitions tagged_transition_matrices(const SystemParams& params) {
  return TaggedModel(params).transitions();
}

}  // namespace paoii
