#include <gtest/gtest.h>

#include <random>

#include "mkdual/potentials.hpp"
#include "mkdual/subsidy.hpp"
#include "oracles.hpp"

using namespace mkdual;

namespace {

const CostMatrix kFixA = CostMatrix::from_rows({{0, 1}, {1, 0}});

CostMatrix fix_c() { return CostMatrix::from_rows({{1, kInf, kInf}, {0, 1, kInf}, {0, 0, 1}}); }

constexpr ConstraintTag kTags[] = {ConstraintTag::W1, ConstraintTag::S1, ConstraintTag::W2, ConstraintTag::S2};

struct Case {
  std::vector<double> mu, nu;
  CostMatrix c;
  TransportPlan pi;
};

// A random instance and a random vertex plan on it.
std::optional<Case> random_case(std::mt19937_64& rng, std::size_t n, std::size_t m, double inf_density) {
  Case k{oracle::random_weights(n, rng), oracle::random_weights(m, rng), oracle::random_cost(n, m, rng, inf_density),
         {}};
  auto v = oracle::random_vertex(k.mu, k.nu, k.c, rng);
  if (!v) return std::nullopt;
  k.pi = *v;
  return k;
}

}  // namespace

TEST(ComputeSubsidy, FixAAntiDiagonal) {
  const auto pi = TransportPlan::from_rows({{0, 0.5}, {0.5, 0}});
  const auto f = compute_subsidy(pi, kFixA);
  EXPECT_DOUBLE_EQ(f.alpha, 1.0);
  EXPECT_DOUBLE_EQ(f.total_under_plan, 1.0);
  EXPECT_DOUBLE_EQ(f.optimum, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(f.duals.phi(i), 0.0);
    EXPECT_EQ(f.duals.psi(i), 0.0);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(f.entries(i, j), kFixA(i, j));
  }
}

TEST(ComputeSubsidy, OptimalPlansNeedNothing) {
  const auto a = compute_subsidy(TransportPlan::diagonal(DiscreteMeasure::uniform(2)), kFixA);
  EXPECT_EQ(a.alpha, 0.0);
  EXPECT_EQ(a.total_under_plan, 0.0);
  EXPECT_EQ(a.entries(0, 0), 0.0);
  EXPECT_EQ(a.entries(1, 1), 0.0);

  const auto c = compute_subsidy(TransportPlan::diagonal(DiscreteMeasure::uniform(3)), fix_c());
  EXPECT_NEAR(c.alpha, 0.0, 1e-15);
  EXPECT_NEAR(c.total_under_plan, 0.0, 1e-15);
  EXPECT_EQ(c.entries(0, 1), kInf);
}

TEST(ComputeSubsidy, Errors) {
  const auto bad = TransportPlan::from_rows({{1.0 / 3, 0, 0}, {0, 0, 1.0 / 3}, {0, 1.0 / 3, 0}});
  EXPECT_THROW(compute_subsidy(bad, fix_c()), InputError);
}

TEST(SubsidyConstraint, Examples) {
  const auto pi = TransportPlan::from_rows({{0, 0.5}, {0.5, 0}});
  EXPECT_FALSE(verify_subsidy_constraint(kFixA, pi, kFixA, ConstraintTag::W2));
  const auto w1 = verify_subsidy_constraint(CostMatrix(2, 2, 0.0), pi, kFixA, ConstraintTag::W1);
  ASSERT_TRUE(w1);
  EXPECT_DOUBLE_EQ(w1->total_weight, -2.0);
  const auto f = compute_subsidy(pi, kFixA);
  for (auto tag : kTags) EXPECT_FALSE(verify_subsidy_constraint(f.entries, pi, kFixA, tag)) << to_string(tag);
}

TEST(SubsidyConstraint, TagNames) {
  for (auto tag : kTags) EXPECT_EQ(constraint_from_string(to_string(tag)), tag);
  EXPECT_THROW(constraint_from_string("W3"), InputError);
}

TEST(LowerBound, Examples) {
  const auto pi = TransportPlan::from_rows({{0, 0.5}, {0.5, 0}});
  const auto f = compute_subsidy(pi, kFixA);
  EXPECT_TRUE(verify_lower_bound(f.entries, pi, kFixA, 0.0).feasible);
  EXPECT_FALSE(verify_lower_bound(CostMatrix(2, 2, 0.0), pi, kFixA, 0.0).feasible);
  EXPECT_TRUE(verify_lower_bound(kFixA, pi, kFixA, 0.0).feasible);
  const auto id = TransportPlan::diagonal(DiscreteMeasure::uniform(3));
  EXPECT_TRUE(verify_lower_bound(fix_c(), id, fix_c(), 1.0).feasible);
}

TEST(Properties, SubsidyContract) {
  std::mt19937_64 rng(1001);
  int done = 0;
  for (int s = 0; s < 200 && done < 50; ++s) {
    const auto k = random_case(rng, 3 + s % 4, 3 + (s / 4) % 4, 0.1);
    if (!k) continue;
    const auto opt = solve_min_cost(DiscreteMeasure(k->mu), DiscreteMeasure(k->nu), k->c);
    if (opt.status != SolveStatus::Optimal) continue;
    const auto f = compute_subsidy(k->pi, k->c);
    const double alpha = oracle::plan_cost(k->pi, k->c) - opt.value.value();
    EXPECT_NEAR(f.alpha, alpha, 1e-9);
    EXPECT_NEAR(f.total_under_plan, f.alpha, 1e-8);
    for (double v : f.entries.data()) EXPECT_GE(v, 0.0);
    EXPECT_LE(max_rectangle_residual(subsidized_upper(k->c, f.entries)), 1e-8);
    for (auto tag : kTags) EXPECT_FALSE(verify_subsidy_constraint(f.entries, k->pi, k->c, tag)) << to_string(tag);
    EXPECT_TRUE(verify_lower_bound(f.entries, k->pi, k->c, opt.value.value()).feasible);

    // Indifference: every finite plan pays I_c under c - f.
    const auto reduced = subsidized_upper(k->c, f.entries);
    for (int t = 0; t < 5; ++t) {
      const auto other = oracle::random_vertex(k->mu, k->nu, k->c, rng);
      if (!other) continue;
      EXPECT_NEAR(oracle::plan_cost(*other, reduced), opt.value.value(), 1e-8);
    }

    // Minimality: f~ <= f on the support for any W1-feasible f built by adding noise.
    std::uniform_real_distribution<double> u(0, 0.5);
    CostMatrix g(f.entries.rows(), f.entries.cols());
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) g.set(i, j, f.entries(i, j) == kInf ? kInf : f.entries(i, j) + u(rng));
    EXPECT_FALSE(verify_subsidy_constraint(g, k->pi, k->c, ConstraintTag::W1));
    long double tot = 0;
    for (auto [i, j] : k->pi.support()) {
      EXPECT_LE(f.entries(i, j), g(i, j) + 1e-8);
      tot += k->pi(i, j) * static_cast<long double>(g(i, j));
    }
    EXPECT_GE(static_cast<double>(tot), f.alpha - 1e-8);
    ++done;
  }
  EXPECT_EQ(done, 50);
}

// S2 => S1 => W1 and S2 => W2 => W1 on arbitrary nonnegative f.
TEST(Properties, ConstraintLadder) {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> u(0, 1);
  int counterexamples = 0, cases = 0;
  int holds[4] = {0, 0, 0, 0};
  for (int s = 0; s < 400 && cases < 200; ++s) {
    const auto k = random_case(rng, 2 + s % 3, 2 + (s / 3) % 3, 0.0);
    if (!k) continue;
    CostMatrix f(k->c.rows(), k->c.cols());
    const int mode = s % 3;
    const auto base = compute_subsidy(k->pi, k->c);
    for (std::size_t i = 0; i < f.rows(); ++i)
      for (std::size_t j = 0; j < f.cols(); ++j) {
        double v = mode == 0 ? u(rng) : base.entries(i, j);
        if (mode == 2 && k->pi(i, j) > 0) v += 0.3 * u(rng);
        f.set(i, j, v);
      }
    bool ok[4];
    for (int t = 0; t < 4; ++t) {
      ok[t] = !verify_subsidy_constraint(f, k->pi, k->c, kTags[t]).has_value();
      holds[t] += ok[t];
    }
    const bool w1 = ok[0], s1 = ok[1], w2 = ok[2], s2 = ok[3];
    if ((s2 && !s1) || (s1 && !w1) || (s2 && !w2) || (w2 && !w1)) ++counterexamples;
    ++cases;
  }
  EXPECT_EQ(cases, 200);
  EXPECT_EQ(counterexamples, 0);
  for (int t = 0; t < 4; ++t) EXPECT_GT(holds[t], 0) << to_string(kTags[t]);
  EXPECT_LT(holds[3], 200);
}
