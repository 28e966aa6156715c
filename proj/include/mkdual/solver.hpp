#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mkdual/core.hpp"

namespace mkdual {

enum class SolveStatus {
  Optimal,
  Infeasible,  // no plan avoids every +inf entry
  Stalled,     // iteration cap hit (cycle canceling only); plan is the best found
};

const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<TransportPlan> plan;  // absent iff Infeasible
  ExtReal value = ExtReal::inf();     // I_c; +inf iff Infeasible
  std::size_t iterations = 0;         // augmentations or cancellations
};

struct SweepResult {
  std::vector<double> cutoffs;
  std::vector<double> values;  // values[k] = I_{c ^ cutoffs[k]}
};

// Exact transportation LP by successive shortest paths with node potentials.
// +inf entries are absent edges. Ties go to the lowest-index path, so the
// output is deterministic.
SolveResult solve_min_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);

// Optimal values for min(c, n) over each cutoff n. Cutoffs must be strictly
// increasing and positive. Solves run concurrently; order of results follows
// `cutoffs`.
SweepResult truncation_sweep(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                             std::span<const double> cutoffs);

// Minimum plan cost over all n! permutation plans. Only for uniform square
// problems with n <= 8, where permutation matrices are the extreme points.
ExtReal brute_force_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);

// Classic northwest-corner plan. Returns nullopt when it puts mass on a +inf
// entry.
std::optional<TransportPlan> northwest_corner(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                              const CostMatrix& c);

}  // namespace mkdual
