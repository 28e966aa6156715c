#include "mkdual/subsidy.hpp"

#include <algorithm>
#include <cmath>

#include "mkdual/potentials.hpp"
#include "mkdual/solver.hpp"

namespace mkdual {

const char* to_string(ConstraintTag t) {
  switch (t) {
    case ConstraintTag::W1:
      return "W1";
    case ConstraintTag::S1:
      return "S1";
    case ConstraintTag::W2:
      return "W2";
    case ConstraintTag::S2:
      return "S2";
  }
  return "?";
}

ConstraintTag constraint_from_string(const std::string& s) {
  if (s == "W1" || s == "w1") return ConstraintTag::W1;
  if (s == "S1" || s == "s1") return ConstraintTag::S1;
  if (s == "W2" || s == "w2") return ConstraintTag::W2;
  if (s == "S2" || s == "s2") return ConstraintTag::S2;
  throw InputError("unknown constraint tag '" + s + "' (expected W1, S1, W2 or S2)");
}

namespace {

constexpr double kClampTol = 1e-9;

void require_same_shape(const CostMatrix& a, const CostMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError(std::string(what) + ": dimension mismatch");
}

}  // namespace

CostMatrix subsidized_upper(const CostMatrix& c, const CostMatrix& f) {
  require_same_shape(c, f, "subsidized_upper");
  CostMatrix out(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) out.set(i, j, ext_sub(c(i, j), f(i, j)));
  return out;
}

CostMatrix subsidized_lower(const CostMatrix& c, const CostMatrix& f) {
  require_same_shape(c, f, "subsidized_lower");
  CostMatrix out(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) out.set(i, j, c(i, j) == kInf ? -kInf : ext_sub(c(i, j), f(i, j)));
  return out;
}

SubsidyFunction compute_subsidy(const TransportPlan& pi, const CostMatrix& c) {
  if (pi.rows() != c.rows() || pi.cols() != c.cols()) throw InputError("compute_subsidy: dimension mismatch");
  const ExtReal cost_pi = plan_cost(pi, c);
  if (!cost_pi.is_finite()) throw InputError("compute_subsidy: plan has infinite cost");
  const auto mu = DiscreteMeasure::normalized(pi.row_sums());
  const auto nu = DiscreteMeasure::normalized(pi.col_sums());
  const auto opt = solve_min_cost(mu, nu, c);
  if (opt.status != SolveStatus::Optimal) throw InputError("compute_subsidy: transport problem is infeasible");

  SubsidyFunction out;
  out.optimum = opt.value.value();
  out.duals = potentials_from_support(SupportSet::of(*opt.plan), c);
  out.entries = CostMatrix(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      double v = ext_sub(c(i, j), ext_add(out.duals.phi(i), out.duals.psi(j)));
      if (v < 0.0) {
        if (v < -kClampTol)
          throw InternalError("compute_subsidy: dual potentials exceed the cost at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
        out.max_clamp = std::max(out.max_clamp, -v);
        v = 0.0;
      }
      out.entries.set(i, j, v);
    }
  }
  out.alpha = cost_pi.value() - out.optimum;
  out.total_under_plan = plan_cost(pi, out.entries).value();
  return out;
}

std::pair<CostMatrix, CostMatrix> constraint_costs(const CostMatrix& f, const CostMatrix& c, ConstraintTag tag) {
  require_same_shape(c, f, "constraint_costs");
  switch (tag) {
    case ConstraintTag::W1:
      return {c, subsidized_upper(c, f)};
    case ConstraintTag::S1:
      return {subsidized_upper(c, f), subsidized_upper(c, f)};
    case ConstraintTag::W2:
      return {c, subsidized_lower(c, f)};
    case ConstraintTag::S2:
      return {subsidized_upper(c, f), subsidized_lower(c, f)};
  }
  throw InputError("constraint_costs: unknown tag");
}

std::optional<CycleCertificate> verify_subsidy_constraint(const CostMatrix& f, const TransportPlan& pi,
                                                          const CostMatrix& c, ConstraintTag tag, double tol) {
  if (pi.rows() != c.rows() || pi.cols() != c.cols()) throw InputError("verify_subsidy_constraint: dimension mismatch");
  auto [upper, lower] = constraint_costs(f, c, tag);
  switch (tag) {
    case ConstraintTag::W1:
    case ConstraintTag::S1:
      return check_support_cycles(SupportSet::of(pi), upper, lower, tol);
    case ConstraintTag::W2:
    case ConstraintTag::S2: {
      const SandwichInput s{std::move(upper), std::move(lower)};
      return check_w3(s, tol);
    }
  }
  return std::nullopt;
}

FeasibilityVerdict verify_lower_bound(const CostMatrix& f, const TransportPlan& pi, const CostMatrix& c, double Ic,
                                      double tol) {
  FeasibilityVerdict v;
  const double paid = plan_cost(pi, f).value();
  const double alpha = plan_cost(pi, c).value() - Ic;
  if (paid < alpha - tol) v.add({Violation::npos, Violation::npos, paid - alpha});
  return v;
}

}  // namespace mkdual
