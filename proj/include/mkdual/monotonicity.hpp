#pragma once

// The rerouting graph on support pairs: c-cyclical monotonicity certificates,
// cyclic mass shifts that improve a plan, and a cycle-canceling solver used as
// an independent cross-check of solve_min_cost.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mkdual/core.hpp"
#include "mkdual/solver.hpp"

namespace mkdual {

using IndexPair = std::pair<std::size_t, std::size_t>;

// Distinct (x, y) index pairs; for a plan, the cells carrying positive mass.
struct SupportSet {
  std::vector<IndexPair> pairs;

  static SupportSet of(const TransportPlan& pi) { return {pi.support()}; }
  [[nodiscard]] std::size_t size() const { return pairs.size(); }
};

// Cyclically ordered (x_1,y_1),...,(x_k,y_k) whose chain sum
//   sum_i upper(x_{i+1}, y_i) - lower(x_i, y_i),   x_{k+1} = x_1
// is below -tol. For plain monotonicity upper = lower = c.
struct CycleCertificate {
  std::vector<IndexPair> pairs;
  double total_weight = 0.0;
};

// Chain sum of `pairs` under the inf - inf = inf convention.
double chain_sum(const std::vector<IndexPair>& pairs, const CostMatrix& upper, const CostMatrix& lower);
inline double chain_sum(const std::vector<IndexPair>& pairs, const CostMatrix& c) { return chain_sum(pairs, c, c); }

// Thrown by operations whose precondition is a cycle condition; carries the witness.
class CycleViolation : public std::runtime_error {
 public:
  CycleViolation(const std::string& what, CycleCertificate cert)
      : std::runtime_error(what), cert_(std::move(cert)) {}
  [[nodiscard]] const CycleCertificate& certificate() const { return cert_; }

 private:
  CycleCertificate cert_;
};

// Digraph on support pairs with w(p -> q) = c(x_q, y_p) - c(x_p, y_p).
// nullopt means monotone; otherwise a fewest-pairs cycle with weight < -tol.
std::optional<CycleCertificate> check_cyclical_monotonicity(const SupportSet& support, const CostMatrix& c,
                                                            double tol = kFeasTol);

// Same graph for an arbitrary (upper, lower) pair of costs on the given
// support. Used by the subsidy constraints W1 and S1.
std::optional<CycleCertificate> check_support_cycles(const SupportSet& support, const CostMatrix& upper,
                                                     const CostMatrix& lower, double tol = kFeasTol);

// Reroutes delta = min certificate mass along the cycle: each (x_i, y_i)
// loses delta and (x_{i+1}, y_i) gains it. Marginals are unchanged and the
// cost drops by delta * |total_weight|.
TransportPlan improve_plan(const TransportPlan& pi, const CycleCertificate& cert, const CostMatrix& c);

// Mass moved by improve_plan for this certificate.
double improvement_step(const TransportPlan& pi, const CycleCertificate& cert);

// Starts from the northwest-corner plan (or any finite feasible plan when that
// corner touches +inf) and cancels minimum-mean negative cycles until the
// support is monotone. Stops with status Stalled after max_iterations.
SolveResult solve_by_cycle_canceling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                                     std::size_t max_iterations = 100000);

}  // namespace mkdual
