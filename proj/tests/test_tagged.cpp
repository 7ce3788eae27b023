#include <gtest/gtest.h>

#include "oracles.hpp"
#include "paoii/tagged.hpp"

using namespace paoii;

namespace {

SystemParams make(int n, double lambda, double alpha, double beta, double eps, double psi) {
  SystemParams p;
  p.n_sensors = n;
  p.lambda = lambda;
  p.alpha = alpha;
  p.beta = beta;
  p.eps = eps;
  p.psi = psi;
  return p;
}

}  // namespace

TEST(TaggedSuccess, LoneNode) {
  const auto v = tagged_success_vectors(make(1, 0.01, 0.9, 0.5, 0.1, 0.1));
  ASSERT_EQ(v.eta.size(), 1u);
  EXPECT_NEAR(v.eta[0], 0.81, 1e-15);
  EXPECT_NEAR(v.nu[0], 0.45, 1e-15);
}

TEST(TaggedTransitions, RowConservation) {
  for (int n : {1, 2, 5, 9}) {
    const TaggedModel model(make(n, 0.07, 0.85, 0.2, 0.15, 0.25));
    const auto& s = model.success();
    const auto& t = model.transitions();
    for (std::size_t r = 0; r < model.others().size(); ++r) {
      EXPECT_GE(s.eta[r], 0.0);
      EXPECT_LE(s.eta[r], 1.0);
      EXPECT_GE(s.nu[r], 0.0);
      EXPECT_LE(s.nu[r], 1.0);
      EXPECT_NEAR(t.u.row_sum(r) + t.v.row_sum(r) + s.eta[r], 1.0, 1e-12);
      EXPECT_NEAR(t.w.row_sum(r) + s.nu[r], 1.0, 1e-12);
    }
  }
}

TEST(TaggedModel, MatchesJointOutcomeEnumeration) {
  const std::vector<SystemParams> cases = {make(1, 0.2, 0.9, 0.5, 0.1, 0.1), make(2, 0.3, 0.7, 0.4, 0.2, 0.3),
                                           make(2, 0.05, 1.0, 1.0, 0.0, 0.0), make(3, 0.5, 0.6, 0.3, 0.1, 0.5)};
  for (const auto& p : cases) {
    const TaggedModel model(p);
    const auto bf = oracle::brute_force_tagged(model.others(), p);
    const auto& t = model.transitions();
    for (std::size_t r = 0; r < model.others().size(); ++r) {
      EXPECT_NEAR(model.success().eta[r], bf.eta[r], 1e-12);
      EXPECT_NEAR(model.success().nu[r], bf.nu[r], 1e-12);
      for (std::size_t c = 0; c < model.others().size(); ++c) {
        EXPECT_NEAR(t.u.at(r, c), bf.u[r][c], 1e-12);
        EXPECT_NEAR(t.v.at(r, c), bf.v[r][c], 1e-12);
        EXPECT_NEAR(t.w.at(r, c), bf.w[r][c], 1e-12);
      }
    }
  }
}

TEST(AnomalyPosterior, LoneNode) {
  const auto p = make(1, 0.05, 0.9, 0.5, 0.1, 0.2);
  const StateSpace space(1);
  const auto m = build_transition_matrix(space, p);
  const auto pi = solve_stationary(m, p.lambda);
  const auto post = anomaly_posterior(space, pi, p);
  EXPECT_EQ(post.p_pkt[space.index({1, 0, 0})], 0.0);
  EXPECT_EQ(post.p_pkt[space.index({0, 1, 0})], 0.0);
  EXPECT_NEAR(post.p_pkt[space.index({0, 0, 0})] + post.p_pkt[space.index({0, 0, 1})], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(post.p_id[space.index({0, 0, 0})], 1.0);
  EXPECT_DOUBLE_EQ(post.p_id[space.index({0, 0, 1})], 0.0);
}

TEST(AnomalyPosterior, MatchesBayesOverEnumeratedChain) {
  const auto p = make(3, 0.04, 0.9, 0.1, 0.1, 0.2);
  const StateSpace space(3);
  const auto m = build_transition_matrix(space, p);
  oracle::DenseMatrix dense(space.size(), std::vector<double>(space.size()));
  for (std::size_t r = 0; r < space.size(); ++r)
    for (std::size_t c = 0; c < space.size(); ++c) dense[r][c] = m.at(r, c);
  const auto pi_ref = oracle::stationary_dense(dense);
  // P(anomaly born in s) from per-node arrival counting.
  std::vector<double> joint(space.size());
  double total = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& s = space[i];
    double arrivals = 0.0;
    for (int v = 0; v < 3; ++v) {
      const int mode = oracle::canonical_modes(s, 3)[static_cast<std::size_t>(v)];
      if (mode == oracle::kIdle || mode == oracle::kMistaken) arrivals += p.lambda;
    }
    joint[i] = pi_ref[i] * arrivals;
    total += joint[i];
  }
  const auto post = anomaly_posterior(space, solve_stationary(m, p.lambda), p);
  for (std::size_t i = 0; i < space.size(); ++i) {
    EXPECT_NEAR(post.p_pkt[i], joint[i] / total, 1e-12);
    const auto& s = space[i];
    if (s.m + s.idle(3) > 0) EXPECT_DOUBLE_EQ(post.p_id[i], double(s.idle(3)) / (s.m + s.idle(3)));
    else EXPECT_EQ(post.p_id[i], 0.0);
  }
}

TEST(AnomalyPosterior, RejectsZeroLambda) {
  const auto p = make(2, 0.0, 0.9, 0.1, 0.1, 0.1);
  const StateSpace space(2);
  const auto pi = solve_stationary(build_transition_matrix(space, p), p.lambda);
  EXPECT_THROW(anomaly_posterior(space, pi, p), DomainError);
}
