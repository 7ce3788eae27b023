#include <gtest/gtest.h>

#include "oracles.hpp"
#include "paoii/transition.hpp"

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

const std::vector<SystemParams>& small_cases() {
  static const std::vector<SystemParams> cases = {
      make(1, 0.01, 0.9, 0.1, 0.1, 0.1), make(2, 0.3, 0.7, 0.4, 0.2, 0.3),
      make(3, 0.05, 0.9, 0.02, 0.1, 0.0), make(4, 0.2, 0.5, 0.6, 0.0, 0.2),
      make(4, 0.6, 1.0, 1.0, 0.3, 0.5)};
  return cases;
}

}  // namespace

TEST(TransitionMatrix, RowsAreStochasticAtTableSize) {
  SystemParams p;  // N = 20 defaults
  const StateSpace space(p.n_sensors);
  const auto m = build_transition_matrix(space, p);
  ASSERT_EQ(m.rows_built(), space.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    EXPECT_NEAR(m.row_sum(r), 1.0, 1e-12);
    for (double v : m.row_values(r)) EXPECT_GE(v, 0.0);
  }
}

TEST(TransitionMatrix, LoneNodeDelivery) {
  const auto p = make(1, 0.0, 0.9, 0.5, 0.1, 0.1);
  const StateSpace space(1);
  const auto m = build_transition_matrix(space, p);
  EXPECT_NEAR(m.at(space.index({1, 0, 0}), space.index({0, 0, 0})), 0.729, 1e-15);
}

TEST(TransitionMatrix, MatchesPiecewiseClosedForm) {
  for (const auto& p : small_cases()) {
    const StateSpace space(p.n_sensors);
    const auto m = build_transition_matrix(space, p);
    for (std::size_t r = 0; r < space.size(); ++r)
      for (std::size_t c = 0; c < space.size(); ++c)
        EXPECT_NEAR(m.at(r, c), oracle::piecewise_entry(space[r], space[c], p.n_sensors, p), 1e-12)
            << "N=" << p.n_sensors << " row " << r << " col " << c;
  }
}

TEST(TransitionMatrix, MatchesNodeLevelEnumeration) {
  for (const auto& p : small_cases()) {
    const StateSpace space(p.n_sensors);
    const auto m = build_transition_matrix(space, p);
    const auto bf = oracle::brute_force_transition(space, p);
    for (std::size_t r = 0; r < space.size(); ++r)
      for (std::size_t c = 0; c < space.size(); ++c)
        EXPECT_NEAR(m.at(r, c), bf[r][c], 1e-12) << "N=" << p.n_sensors;
  }
}

TEST(SparseMatrix, LeftAndRightProducts) {
  SparseMatrix m(2);
  const std::vector<std::size_t> c0{0, 1}, c1{1};
  const std::vector<double> v0{0.25, 0.75}, v1{1.0};
  m.push_row(c0, v0);
  m.push_row(c1, v1);
  const auto y = m.left_multiply(std::vector<double>{1.0, 2.0});
  EXPECT_DOUBLE_EQ(y[0], 0.25);
  EXPECT_DOUBLE_EQ(y[1], 2.75);
  const auto z = m.right_multiply(std::vector<double>{4.0, 8.0});
  EXPECT_DOUBLE_EQ(z[0], 7.0);
  EXPECT_DOUBLE_EQ(z[1], 8.0);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 0.0);
  EXPECT_THROW(m.push_row(c1, v1), std::logic_error);
}
