#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkdual/core.hpp"
#include "mkdual/solver.hpp"
#include "oracles.hpp"

using namespace mkdual;

namespace {

const CostMatrix kFixA = CostMatrix::from_rows({{0, 1}, {1, 0}});

CostMatrix fix_c() { return CostMatrix::from_rows({{1, kInf, kInf}, {0, 1, kInf}, {0, 0, 1}}); }

TransportPlan anti_diagonal() { return TransportPlan::from_rows({{0, 0.5}, {0.5, 0}}); }

}  // namespace

TEST(ExtReal, SubtractionTable) {
  EXPECT_EQ(ext_sub(kInf, kInf), kInf);
  EXPECT_EQ(ext_sub(5.0, 3.0), 2.0);
  EXPECT_EQ(ext_sub(-kInf, 4.0), -kInf);
  EXPECT_EQ(ext_sub(-kInf, -kInf), kInf);
  EXPECT_EQ(ext_sub(1.0, kInf), -kInf);
  EXPECT_EQ(ext_sub(1.0, -kInf), kInf);
  EXPECT_EQ(ext_sub(kInf, 2.0), kInf);
  EXPECT_EQ(ext_sub(-kInf, kInf), -kInf);
}

TEST(ExtReal, NoNaN) {
  EXPECT_THROW(ExtReal(std::nan("")), std::domain_error);
  EXPECT_EQ(ext_add(kInf, -kInf), kInf);
  EXPECT_EQ(mass_times(0.0, kInf), 0.0);
  EXPECT_EQ(mass_times(0.0, -kInf), 0.0);
}

TEST(DiscreteMeasure, RejectsBadWeights) {
  EXPECT_THROW(DiscreteMeasure({0.5, 0.4}), InputError);
  EXPECT_THROW(DiscreteMeasure({1.0, 0.0}), InputError);
  EXPECT_THROW(DiscreteMeasure({1.5, -0.5}), InputError);
  EXPECT_NO_THROW(DiscreteMeasure({0.25, 0.75}));
  const auto m = DiscreteMeasure::normalized({1, 3});
  EXPECT_DOUBLE_EQ(m.weight(1), 0.75);
  EXPECT_EQ(m.labels()[1], "1");
}

TEST(Instance, ZeroWeightsAreDropped) {
  const auto c = CostMatrix::from_rows({{0, 1, 2}, {3, 4, 5}});
  const auto inst = make_instance({1.0, 0.0}, {0.5, 0.0, 0.5}, c);
  EXPECT_EQ(inst.mu.size(), 1u);
  EXPECT_EQ(inst.nu.size(), 2u);
  EXPECT_EQ(inst.cost(0, 1), 2.0);
  EXPECT_EQ(inst.nu.labels()[1], "2");
}

TEST(PlanCost, Fixtures) {
  const auto mu = DiscreteMeasure::uniform(2);
  EXPECT_EQ(plan_cost(TransportPlan::diagonal(mu), kFixA).value(), 0.0);
  EXPECT_EQ(plan_cost(anti_diagonal(), kFixA).value(), 1.0);
  const auto id = TransportPlan::diagonal(DiscreteMeasure::uniform(3));
  EXPECT_NEAR(plan_cost(id, fix_c()).value(), 1.0, 1e-15);
  // 0 * inf = 0: the identity avoids every +inf entry.
  EXPECT_TRUE(plan_cost(id, fix_c()).is_finite());
  EXPECT_TRUE(plan_cost(TransportPlan::from_rows({{0, 1.0 / 3, 0}, {1.0 / 3, 0, 0}, {0, 0, 1.0 / 3}}), fix_c())
                  .is_pos_inf());
}

TEST(PlanCost, MatchesOracle) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto mu = oracle::random_weights(5, rng), nu = oracle::random_weights(6, rng);
    const auto c = oracle::random_cost(5, 6, rng, 0.2);
    const auto pi = oracle::random_vertex(mu, nu, c, rng);
    if (!pi) continue;
    EXPECT_NEAR(plan_cost(*pi, c).value(), oracle::plan_cost(*pi, c), 1e-14);
  }
}

TEST(CheckMarginals, Examples) {
  const auto u = DiscreteMeasure::uniform(2);
  EXPECT_TRUE(check_marginals(TransportPlan::diagonal(u), u, u).feasible);
  const auto bad = check_marginals(TransportPlan::from_rows({{1, 0}, {0, 0}}), u, u);
  EXPECT_FALSE(bad.feasible);
  bool row2 = false;
  for (const auto& v : bad.violations)
    if (v.row == 1 && v.col == Violation::npos) row2 = true;
  EXPECT_TRUE(row2);
  EXPECT_FALSE(check_marginals(TransportPlan::from_rows({{0.6, -0.1}, {-0.1, 0.6}}), u, u).feasible);
}

TEST(EvaluateJ, Examples) {
  const auto u3 = DiscreteMeasure::uniform(3);
  const auto id = TransportPlan::diagonal(u3);
  EXPECT_EQ(evaluate_J(PotentialPair::zeros(3, 3), id).value(), 0.0);
  const PotentialPair pp({0, -1, -2}, {1, 2, 3});
  EXPECT_NEAR(evaluate_J(pp, id).value(), 1.0, 1e-15);
  EXPECT_NEAR(evaluate_J(pp, u3, u3).value(), 1.0, 1e-15);
  const PotentialPair neg({-kInf, 0}, {0, 0});
  EXPECT_TRUE(evaluate_J(neg, TransportPlan::diagonal(DiscreteMeasure::uniform(2))).is_neg_inf());
}

TEST(Feasibility, Examples) {
  EXPECT_TRUE(check_feasible_potentials(PotentialPair::zeros(2, 2), kFixA).feasible);
  const auto v = check_feasible_potentials(PotentialPair({2, 0}, {0, 0}), kFixA);
  ASSERT_FALSE(v.feasible);
  EXPECT_EQ(v.violations[0].row, 0u);
  EXPECT_EQ(v.violations[0].col, 0u);
  EXPECT_DOUBLE_EQ(v.violations[0].slack, -2.0);

  // The reciprocal grid with (1/x, 1 - 1/y).
  const int n = 40;
  CostMatrix c(n, n);
  std::vector<double> phi(n), psi(n);
  for (int i = 0; i < n; ++i) {
    const double x = double(i + 1) / n;
    phi[i] = 1 / x;
    psi[i] = 1 - 1 / x;
    for (int j = 0; j < n; ++j) c.set(i, j, std::abs(1 / x - double(n) / (j + 1) + 1));
  }
  EXPECT_TRUE(check_feasible_potentials(PotentialPair(phi, psi), c, 1e-12).feasible);
}

TEST(Truncate, Examples) {
  const auto t = truncate_potentials(PotentialPair({-5, 3}, {0, 0}), 2);
  EXPECT_EQ(t.phi(0), -2);
  EXPECT_EQ(t.phi(1), 2);
  const PotentialPair pp({0.5, -1}, {2, -3});
  const auto same = truncate_potentials(pp, 3);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(same.phi(i), pp.phi(i));
    EXPECT_EQ(same.psi(i), pp.psi(i));
  }
  EXPECT_EQ(truncate_potentials(PotentialPair({0, -kInf}, {0, 0}), 3).phi(1), -3);
}

TEST(ShiftCost, Examples) {
  const auto c = CostMatrix::from_rows({{1, 2}, {3, 4}});
  const std::vector<double> z{0, 0};
  const auto same = shift_cost(c, z, z);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(same(i, j), c(i, j));

  const auto sum = CostMatrix::from_rows({{0, 1}, {1, 2}});
  const std::vector<double> xs{0, 1};
  const auto zero = shift_cost(sum, xs, xs);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(zero.shifted());

  const auto neg = CostMatrix::from_rows({{-1, 0}, {0, 1}});
  const std::vector<double> a{-1, 0};
  const auto s = shift_cost(neg, a, z);
  EXPECT_EQ(s(0, 0), 0);
  EXPECT_EQ(s(0, 1), 1);
  EXPECT_EQ(s(1, 0), 0);
  EXPECT_EQ(s(1, 1), 1);

  EXPECT_THROW(shift_cost(c, std::vector<double>{2, 0}, z), InputError);
  const auto inf = CostMatrix::from_rows({{kInf, 0}, {0, 0}});
  EXPECT_EQ(shift_cost(inf, std::vector<double>{-1, -1}, z)(0, 0), kInf);
}

// Solving a shifted cost and adding the offset back recovers the original optimum.
TEST(ShiftCost, OptimumShiftsByOffset) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + t % 5, m = 2 + (t * 3) % 5;
    const auto mu = DiscreteMeasure(oracle::random_weights(n, rng));
    const auto nu = DiscreteMeasure(oracle::random_weights(m, rng));
    const auto c = oracle::random_cost(n, m, rng, 0.1, 10.0);
    const auto base = solve_min_cost(mu, nu, c);
    if (base.status != SolveStatus::Optimal) continue;
    std::vector<double> a(n, kInf), b(m, kInf);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (c(i, j) != kInf) {
          a[i] = std::min(a[i], 0.5 * c(i, j));
          b[j] = std::min(b[j], 0.5 * c(i, j));
        }
    for (auto& v : a)
      if (v == kInf) v = 0;
    for (auto& v : b)
      if (v == kInf) v = 0;
    const auto sc = shift_cost(c, a, b);
    const auto shifted = solve_min_cost(mu, nu, sc);
    ASSERT_EQ(shifted.status, SolveStatus::Optimal);
    EXPECT_NEAR(shifted.value.value() + shift_offset(sc, mu, nu), base.value.value(), 1e-9);
    const auto pp = unshift_potentials(PotentialPair::zeros(n, m), sc);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(pp.phi(i), a[i]);
  }
}

// Weak duality, independence of the plan, and truncation behaviour on random instances.
TEST(Properties, DualFunctional) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 3 + t % 4, m = 3 + (t / 4) % 4;
    const auto wmu = oracle::random_weights(n, rng), wnu = oracle::random_weights(m, rng);
    const DiscreteMeasure mu(wmu), nu(wnu);
    const auto c = oracle::random_cost(n, m, rng, 0.0, 5.0);
    // Feasible potentials: phi random, psi = min_x c - phi.
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> phi(n), psi(m, kInf);
    for (auto& v : phi) v = u(rng);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < n; ++i) psi[j] = std::min(psi[j], c(i, j) - phi[i]);
    const PotentialPair pp(phi, psi);
    ASSERT_TRUE(check_feasible_potentials(pp, c).feasible);

    std::vector<TransportPlan> plans;
    for (int k = 0; k < 3; ++k)
      if (auto v = oracle::random_vertex(wmu, wnu, c, rng)) plans.push_back(*v);
    ASSERT_GE(plans.size(), 3u);
    const double j0 = evaluate_J(pp, plans[0]).value();
    for (const auto& p : plans) {
      EXPECT_TRUE(check_marginals(p, mu, nu).feasible);
      EXPECT_NEAR(evaluate_J(pp, p).value(), j0, 1e-9);
      EXPECT_LE(evaluate_J(pp, p).value(), plan_cost(p, c).value() + 1e-9);
      EXPECT_TRUE(oracle::weak_duality_holds(pp, p, c));
    }
    EXPECT_NEAR(evaluate_J(pp, mu, nu).value(), j0, 1e-9);

    // Split the plan by the sign of phi + psi; each half moves monotonically in n.
    TransportPlan pos(n, m), negp(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        (phi[i] + psi[j] >= 0 ? pos : negp)(i, j) = plans[0](i, j);
    double prev_pos = -kInf, prev_neg = kInf;
    for (double cut : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const auto tp = truncate_potentials(pp, cut);
      const double jp = evaluate_J(tp, pos).value(), jn = evaluate_J(tp, negp).value();
      EXPECT_GE(jp, prev_pos - 1e-12);
      EXPECT_LE(jn, prev_neg + 1e-12);
      prev_pos = jp;
      prev_neg = jn;
    }
    EXPECT_NEAR(evaluate_J(truncate_potentials(pp, 100), plans[0]).value(), j0, 1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}
