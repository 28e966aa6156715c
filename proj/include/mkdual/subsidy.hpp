#pragma once

// Subsidy functions: f(x,y) >= 0 paid per unit transported from x to y so
// that rerouting a plan pi no longer pays off. The minimal total subsidy
// under pi equals the optimality gap alpha = I_c[pi] - I_c.
//
// Incentive constraints, strongest last, each a cycle condition:
//   W1  sum c(x_{i+1},y_i) - (c - f)(x_i,y_i) >= 0        pairs in supp(pi)
//   S1  sum (c - f)(x_{i+1},y_i) - (c - f)(x_i,y_i) >= 0  pairs in supp(pi)
//   W2  as W1, all pairs
//   S2  as S1, all pairs (forces every chain sum to be exactly 0)

#include <optional>

#include "mkdual/core.hpp"
#include "mkdual/monotonicity.hpp"

namespace mkdual {

enum class ConstraintTag { W1, S1, W2, S2 };

const char* to_string(ConstraintTag t);
ConstraintTag constraint_from_string(const std::string& s);

struct SubsidyFunction {
  CostMatrix entries;            // f~ = c - (phi (+) psi), +inf where c = +inf
  double total_under_plan = 0;   // sum pi * f~
  double alpha = 0;              // I_c[pi] - I_c
  double optimum = 0;            // I_c
  double max_clamp = 0;          // largest negative rounding residue set to 0
  PotentialPair duals;           // the dual maximizers used
};

// Builds f~ from dual maximizers of the problem whose marginals are those
// of pi. Requires a finite plan cost and a feasible problem.
SubsidyFunction compute_subsidy(const TransportPlan& pi, const CostMatrix& c);

// c - f for use as an upper cost (+inf where c = +inf).
CostMatrix subsidized_upper(const CostMatrix& c, const CostMatrix& f);
// c - f for use as a lower cost: entries where c = +inf can never carry
// mass and impose no lower bound, so they become -inf.
CostMatrix subsidized_lower(const CostMatrix& c, const CostMatrix& f);

// nullopt when the constraint holds at tolerance, else a violating chain.
// W1/S1 certificates are over support pairs, W2/S2 over all pairs; their
// total_weight is chain_sum(pairs, upper, lower) for the tag's (upper, lower).
std::optional<CycleCertificate> verify_subsidy_constraint(const CostMatrix& f, const TransportPlan& pi,
                                                          const CostMatrix& c, ConstraintTag tag,
                                                          double tol = kFeasTol);

// The (upper, lower) costs whose chain sums define a constraint.
std::pair<CostMatrix, CostMatrix> constraint_costs(const CostMatrix& f, const CostMatrix& c, ConstraintTag tag);

// sum pi * f >= (I_c[pi] - Ic) - 1e-8.
FeasibilityVerdict verify_lower_bound(const CostMatrix& f, const TransportPlan& pi, const CostMatrix& c, double Ic,
                                      double tol = 1e-8);

}  // namespace mkdual
