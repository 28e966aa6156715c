#include <gtest/gtest.h>

#include <random>

#include "mkdual/multimarginal.hpp"
#include "mkdual/solver.hpp"
#include "oracles.hpp"

using namespace mkdual;

namespace {

const CostMatrix kFixA = CostMatrix::from_rows({{0, 1}, {1, 0}});

TransportPlan anti_diagonal() { return TransportPlan::from_rows({{0, 0.5}, {0.5, 0}}); }

// e straight from the definition, for a tuple of support indices.
double e_direct(const CostMatrix& c, const SupportSet& sup, const std::vector<std::size_t>& z) {
  long double s = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto [x, y] = sup.pairs[z[i]];
    const auto xn = sup.pairs[z[(i + 1) % z.size()]].first;
    s += static_cast<long double>(c(xn, y)) - c(x, y);
  }
  return std::max(0.0, -static_cast<double>(s));
}

MultiCoupling tight_coupling() {
  // 0.5 on ((x1,y2),(x2,y1)) and 0.5 on the reversed tuple.
  return {2, 2, {{1, 0.5}, {2, 0.5}}, "tight"};
}

}  // namespace

TEST(BuildE, FixA) {
  const SupportSet full{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
  const auto e = build_e(kFixA, full, 2);
  const std::vector<std::size_t> cross{1, 2}, straight{0, 3};
  EXPECT_DOUBLE_EQ(e[e.flat(cross)], 2.0);
  EXPECT_DOUBLE_EQ(e[e.flat(straight)], 0.0);
  for (std::size_t p = 0; p < 4; ++p) {
    const std::vector<std::size_t> rep{p, p};
    EXPECT_EQ(e[e.flat(rep)], 0.0);
  }
  for (std::size_t t = 0; t < e.size(); ++t) EXPECT_EQ(e[t], e[e.shifted(t)]);
}

TEST(BuildE, Errors) {
  const SupportSet s{{{0, 0}}};
  EXPECT_THROW(build_e(kFixA, s, 1), InputError);
  EXPECT_THROW(build_e(CostMatrix::from_rows({{kInf, 0}, {0, 0}}), s, 2), InputError);
  SupportSet big;
  for (std::size_t i = 0; i < 101; ++i) big.pairs.push_back({0, 0});
  EXPECT_THROW(build_e(kFixA, big, 3), InputError);
}

TEST(Candidates, MarginalsAndDeterminism) {
  std::mt19937_64 rng(4);
  const auto mu = oracle::random_weights(4, rng), nu = oracle::random_weights(4, rng);
  const auto pi = *oracle::random_vertex(mu, nu, CostMatrix(4, 4, 0.0), rng);
  const auto sup = SupportSet::of(pi);
  const auto w = support_weights(pi, sup);
  for (std::size_t n : {2u, 3u}) {
    const auto a = candidate_couplings(pi, n, 42, 7);
    const auto b = candidate_couplings(pi, n, 42, 7);
    ASSERT_EQ(a.size(), 7u);
    EXPECT_EQ(a[0].label, "product");
    EXPECT_EQ(a[1].label, "diagonal");
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].atoms, b[k].atoms);
      for (std::size_t d = 0; d < n; ++d) {
        const auto marg = a[k].marginal(d);
        for (std::size_t z = 0; z < w.size(); ++z) EXPECT_NEAR(marg[z], w[z], 1e-9);
      }
    }
    const auto other = candidate_couplings(pi, n, 43, 7);
    bool differs = false;
    for (std::size_t k = 2; k < 7; ++k) differs = differs || other[k].atoms != a[k].atoms;
    EXPECT_TRUE(differs);
  }
  EXPECT_THROW(candidate_couplings(pi, 2, 0, 1), InputError);
}

TEST(BoundCheck, FixADiagonal) {
  const auto pi = TransportPlan::diagonal(DiscreteMeasure::uniform(2));
  const auto sup = SupportSet::of(pi);
  const auto e = build_e(kFixA, sup, 2);
  const auto v = mm_bound_check(pi, e, 0.0, candidate_couplings(pi, 2, 1, 6));
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.max_value, 0.0);
}

TEST(BoundCheck, FixATightAndViolated) {
  const auto pi = anti_diagonal();
  const auto sup = SupportSet::of(pi);
  auto e = build_e(kFixA, sup, 2);
  const auto kappa = tight_coupling();
  EXPECT_NEAR(integrate(e, kappa), 2.0, 1e-12);
  const auto ok = mm_bound_check(pi, e, 1.0, {kappa});
  EXPECT_TRUE(ok.holds);
  EXPECT_NEAR(ok.max_value, 2.0, 1e-12);

  e[1] += 1.0;
  const auto bad = mm_bound_check(pi, e, 1.0, {kappa});
  ASSERT_FALSE(bad.holds);
  ASSERT_EQ(bad.violations.size(), 1u);
  EXPECT_EQ(bad.violations[0].label, "tight");
  EXPECT_NEAR(bad.violations[0].value, 2.5, 1e-12);
  EXPECT_EQ(bad.violations[0].bound, 2.0);
}

TEST(CyclicAverage, PreservesMarginalsAndIntegral) {
  const auto pi = anti_diagonal();
  const auto e = build_e(kFixA, SupportSet::of(pi), 2);
  const MultiCoupling one{2, 2, {{1, 0.5}, {3, 0.5}}, "lopsided"};
  const auto avg = cyclic_average(one);
  EXPECT_NEAR(integrate(e, avg), integrate(e, one), 1e-12);
  const auto m0 = avg.marginal(0), m1 = avg.marginal(1);
  for (std::size_t z = 0; z < 2; ++z) EXPECT_NEAR(m0[z], m1[z], 1e-15);
}

TEST(Symmetrize, Examples) {
  const std::vector<double> f{0.5, 1.5, 2};
  EXPECT_EQ(symmetrize({f, f}), f);
  EXPECT_EQ(symmetrize({{0, 2}, {2, 0}}), (std::vector<double>{1, 1}));
  EXPECT_THROW(symmetrize({{0, 1}, {1}}), InputError);

  // Full FIX-A support: the constant 1 covers e in both coordinates.
  const SupportSet full{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
  const auto e = build_e(kFixA, full, 2);
  const std::vector<double> ones(4, 1.0);
  EXPECT_LE(cover_excess(e, {ones, ones}), 0.0);
  const auto g = symmetrize({ones, ones}, &e);
  EXPECT_LE(cover_excess(e, {g, g}), 0.0);

  const std::vector<double> zeros(4, 0.0);
  EXPECT_THROW(symmetrize({zeros, zeros}, &e), InputError);
}

TEST(Properties, CyclicInvarianceMatchesDefinition) {
  std::mt19937_64 rng(6);
  for (int s = 0; s < 20; ++s) {
    const auto c = oracle::random_cost(4, 4, rng);
    SupportSet sup;
    for (std::size_t i = 0; i < 4; ++i) sup.pairs.push_back({i, (i + s) % 4});
    sup.pairs.push_back({0, 0});
    const std::size_t n = 2 + s % 3;
    const auto e = build_e(c, sup, n);
    for (std::size_t t = 0; t < e.size(); ++t) {
      EXPECT_NEAR(e[t], e_direct(c, sup, e.tuple(t)), 1e-12);
      EXPECT_EQ(e[t], e[e.shifted(t)]);
      EXPECT_GE(e[t], 0.0);
    }
  }
}

// Random covers survive symmetrization.
TEST(Properties, SymmetrizationPreservesCover) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int s = 0; s < 30; ++s) {
    const auto c = oracle::random_cost(3, 3, rng);
    SupportSet sup{{{0, 0}, {1, 2}, {2, 1}, {0, 1}}};
    const std::size_t n = 2 + s % 2;
    const auto e = build_e(c, sup, n);
    std::vector<std::vector<double>> fs(n, std::vector<double>(sup.size()));
    for (auto& f : fs)
      for (auto& v : f) v = u(rng);
    // Lift f_1 until it covers.
    const double excess = cover_excess(e, fs);
    if (excess > 0)
      for (auto& v : fs[0]) v += excess;
    ASSERT_LE(cover_excess(e, fs), 1e-12);
    const auto g = symmetrize(fs, &e);
    EXPECT_LE(cover_excess(e, std::vector<std::vector<double>>(n, g)), 1e-12);
  }
}

TEST(Properties, BoundHoldsOnRandomPlans) {
  std::mt19937_64 rng(10);
  for (int s = 0; s < 50; ++s) {
    const std::size_t n = 2 + s % 2;
    const auto mu = oracle::random_weights(3, rng), nu = oracle::random_weights(3, rng);
    const auto c = oracle::random_cost(3, 3, rng);
    const auto pi = *oracle::random_vertex(mu, nu, c, rng);
    const double opt = solve_min_cost(DiscreteMeasure(mu), DiscreteMeasure(nu), c).value.value();
    const double alpha = std::max(0.0, plan_cost(pi, c).value() - opt);
    const auto e = build_e(c, SupportSet::of(pi), n);
    const auto v = mm_bound_check(pi, e, alpha, candidate_couplings(pi, n, s, 10));
    EXPECT_TRUE(v.holds) << "seed " << s << " max " << v.max_value << " bound " << n * alpha;
  }
}
