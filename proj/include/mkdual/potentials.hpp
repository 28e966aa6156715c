#pragma once

// Constructive duality on finite spaces.
//
// Given an upper cost c_hi and a lower cost c_lo, a pair (phi, psi) with
//   c_lo(x,y) <= phi(x) + psi(y) <= c_hi(x,y)   for all x, y
// exists iff every chain sum  sum_i c_hi(x_{i+1}, y_i) - c_lo(x_i, y_i)  is
// nonnegative (the W3 condition). The chain sums are cycle weights in a
// digraph on X with w(x -> x') = min_y c_hi(x', y) - c_lo(x, y); phi is the
// shortest-path distance from a virtual source joined to every x with weight
// zero, and psi(y) = min_x c_hi(x, y) - phi(x).

#include <optional>
#include <variant>

#include "mkdual/core.hpp"
#include "mkdual/monotonicity.hpp"

namespace mkdual {

struct SandwichInput {
  CostMatrix upper;  // entries in (-inf, +inf]
  CostMatrix lower;  // entries in [-inf, +inf)
};

// Witness that d(x,y) + d(x',y') != d(x,y') + d(x',y).
struct RectangleCertificate {
  std::size_t x = 0, y = 0, x2 = 0, y2 = 0;
  double residual = 0.0;  // d(x,y) + d(x2,y2) - d(x,y2) - d(x2,y)
};

double rectangle_residual(const CostMatrix& d, std::size_t x, std::size_t y, std::size_t x2, std::size_t y2);

// nullopt when W3 holds at tolerance; otherwise the chain, expanded to the
// (x_i, y_i) pairs realizing each minimum. Length-1 chains are included.
std::optional<CycleCertificate> check_w3(const SandwichInput& s, double tol = kFeasTol);

// Separating pair for a W3-feasible input, verified against both bounds
// before returning. Throws CycleViolation if W3 fails, InternalError if the
// verification does. Columns where upper is identically +inf get the
// smallest psi meeting the lower bound (-inf if that bound is vacuous).
PotentialPair sandwich_potentials(const SandwichInput& s, double tol = kFeasTol);

// Potentials witnessing strong c-cyclical monotonicity of a monotone support:
// phi + psi <= c everywhere, equality on the support. Throws CycleViolation
// for a non-monotone support and InputError for +inf on the support.
PotentialPair potentials_from_support(const SupportSet& support, const CostMatrix& c);

// Exact split d = phi (+) psi via the first row and column, or a violated rectangle.
std::variant<PotentialPair, RectangleCertificate> decompose_exact(const CostMatrix& d, double tol = kFeasTol);

// Largest |rectangle residual| over all 2x2 minors with four finite corners.
double max_rectangle_residual(const CostMatrix& d);

// phi + psi <= c everywhere and phi + psi = c (within 1e-8) wherever pi > 0.
FeasibilityVerdict verify_strong_monotonicity(const TransportPlan& pi, const CostMatrix& c, const PotentialPair& pp,
                                              double tol = kFeasTol, double eq_tol = 1e-8);

}  // namespace mkdual
