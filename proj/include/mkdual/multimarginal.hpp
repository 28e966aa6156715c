#pragma once

// Desk-scale checks of the bound
//   sup { integral of e dkappa : kappa in Pi(pi, ..., pi) } <= n * alpha
// for a plan pi with I_c[pi] <= I_c + alpha, where
//   e(z_1..z_n) = ( sum_i c(x_{i+1}, y_i) - c(x_i, y_i) )_-
// over tuples of support pairs z_i = (x_i, y_i). The supremum is not solved
// for; the bound is tested against a family of candidate couplings.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mkdual/core.hpp"
#include "mkdual/monotonicity.hpp"

namespace mkdual {

inline constexpr std::size_t kMaxTuples = 1'000'000;

// Dense table of e over all n-tuples of base points (support pairs), indexed
// by the base-s digits of the tuple with z_1 most significant.
class CyclicGain {
 public:
  CyclicGain() = default;
  CyclicGain(std::size_t base, std::size_t n, std::vector<double> values);

  [[nodiscard]] std::size_t base() const { return base_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  [[nodiscard]] std::size_t flat(std::span<const std::size_t> tuple) const;
  [[nodiscard]] std::vector<std::size_t> tuple(std::size_t flat) const;
  // Flat index of the tuple shifted left by one: (z_2, ..., z_n, z_1).
  [[nodiscard]] std::size_t shifted(std::size_t flat) const;

 private:
  std::size_t base_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// A measure on n-tuples of base points, stored sparsely as (flat index, mass)
// sorted by index.
struct MultiCoupling {
  std::size_t base = 0;
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, double>> atoms;
  std::string label;

  // k-th one-dimensional marginal as a vector over base points.
  [[nodiscard]] std::vector<double> marginal(std::size_t k) const;
};

CyclicGain build_e(const CostMatrix& c, const SupportSet& support, std::size_t n);

// Base-point weights pi(z) for z in the support, in support order.
std::vector<double> support_weights(const TransportPlan& pi, const SupportSet& support);

// Product coupling, diagonal coupling, then `count - 2` cyclic-shift-averaged
// comonotone couplings built from seeded random orderings. Every marginal is
// checked against pi before returning.
std::vector<MultiCoupling> candidate_couplings(const TransportPlan& pi, std::size_t n, std::uint64_t seed,
                                               std::size_t count);

// Average over the n cyclic shifts of the tuple coordinates.
MultiCoupling cyclic_average(const MultiCoupling& kappa);

// Integral of e against kappa.
double integrate(const CyclicGain& e, const MultiCoupling& kappa);

struct BoundViolation {
  std::size_t coupling = 0;
  std::string label;
  double value = 0.0;  // integral of e dkappa
  double bound = 0.0;  // n * alpha
};

struct BoundVerdict {
  bool holds = true;
  double max_value = 0.0;
  std::vector<BoundViolation> violations;
};

// integral e dkappa <= n * alpha + tol for every candidate. Candidates are
// evaluated in parallel; the verdict does not depend on thread count.
BoundVerdict mm_bound_check(const TransportPlan& pi, const CyclicGain& e, double alpha,
                            const std::vector<MultiCoupling>& candidates, double tol = 1e-8);

// f = (f_1 + ... + f_n) / n. If `e` is given, first checks
// e(z) <= f_1(z_1) + ... + f_n(z_n) on every tuple (InputError otherwise),
// then re-checks e(z) <= f(z_1) + ... + f(z_n) on the result (InternalError).
std::vector<double> symmetrize(const std::vector<std::vector<double>>& fs, const CyclicGain* e = nullptr,
                               double tol = 1e-12);

// max over tuples of e(z) - (f_1(z_1) + ... + f_n(z_n)); <= 0 means covered.
double cover_excess(const CyclicGain& e, const std::vector<std::vector<double>>& fs);

}  // namespace mkdual
