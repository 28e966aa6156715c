#pragma once

// Discrete measures, cost matrices, transport plans, potentials and the
// primal/dual evaluation functionals.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mkdual/ext_real.hpp"

namespace mkdual {

// Tolerances shared across modules.
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kMarginalTol = 1e-9;

// Bad caller input (dimensions, non-probability weights, broken preconditions).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A post-condition the library itself should have guaranteed failed.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  // Weights must be > 0 and sum to 1 within kNormTol. Labels default to "0".."n-1".
  explicit DiscreteMeasure(std::vector<double> weights, std::vector<std::string> labels = {});

  static DiscreteMeasure uniform(std::size_t n);
  // Rescales positive weights to sum to exactly 1 before validating.
  static DiscreteMeasure normalized(std::vector<double> weights, std::vector<std::string> labels = {});

  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<double> weights_;
  std::vector<std::string> labels_;
};

// Row-major n x m grid of extended reals (stored as doubles, +-inf allowed, no NaN).
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  [[nodiscard]] ExtReal at(std::size_t i, std::size_t j) const { return ExtReal(data_[i * cols_ + j]); }
  void set(std::size_t i, std::size_t j, double v);
  [[nodiscard]] std::span<const double> data() const { return data_; }

  // Entrywise min(c, n); used for the truncations c ^ n.
  [[nodiscard]] CostMatrix capped(double n) const;

  // A primal cost lies in [0, +inf]; shifted costs may leave that range.
  [[nodiscard]] bool is_primal() const;
  [[nodiscard]] bool shifted() const { return shift_.has_value(); }
  // (a, b) removed by shift_cost, if any.
  [[nodiscard]] const std::optional<std::pair<std::vector<double>, std::vector<double>>>& shift() const {
    return shift_;
  }
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double max_finite() const;

 private:
  friend CostMatrix shift_cost(const CostMatrix&, std::span<const double>, std::span<const double>);
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::optional<std::pair<std::vector<double>, std::vector<double>>> shift_;
};

// Nonnegative n x m mass matrix. Marginals are validated by check_marginals,
// not at construction, so that broken plans can be reported.
class TransportPlan {
 public:
  TransportPlan() = default;
  TransportPlan(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), mass_(rows * cols, 0.0) {}
  TransportPlan(std::size_t rows, std::size_t cols, std::vector<double> mass);
  static TransportPlan from_rows(const std::vector<std::vector<double>>& rows);
  // Diagonal plan diag(mu) for a square problem.
  static TransportPlan diagonal(const DiscreteMeasure& mu);
  // Plan of a permutation: mass w_i at (i, perm[i]); requires uniform-compatible weights.
  static TransportPlan permutation(std::span<const std::size_t> perm, double mass_per_row);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return mass_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return mass_[i * cols_ + j]; }
  [[nodiscard]] std::span<const double> data() const { return mass_; }

  [[nodiscard]] std::vector<double> row_sums() const;
  [[nodiscard]] std::vector<double> col_sums() const;
  // (i, j) with mass > 0, row-major order.
  [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> support() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> mass_;
};

// Dual variables with values in [-inf, inf).
class PotentialPair {
 public:
  PotentialPair() = default;
  PotentialPair(std::vector<double> phi, std::vector<double> psi);
  static PotentialPair zeros(std::size_t n, std::size_t m) {
    return {std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};
  }

  [[nodiscard]] std::span<const double> phi() const { return phi_; }
  [[nodiscard]] std::span<const double> psi() const { return psi_; }
  [[nodiscard]] double phi(std::size_t i) const { return phi_[i]; }
  [[nodiscard]] double psi(std::size_t j) const { return psi_[j]; }

 private:
  std::vector<double> phi_;
  std::vector<double> psi_;
};

// One failed inequality. For marginal checks a row-sum failure has col = npos
// and a column-sum failure has row = npos.
struct Violation {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t row = npos;
  std::size_t col = npos;
  double slack = 0.0;  // negative amount by which the inequality fails
};

struct FeasibilityVerdict {
  bool feasible = true;
  std::vector<Violation> violations;  // nonempty iff !feasible

  void add(Violation v) {
    violations.push_back(v);
    feasible = false;
  }
};

// A transport problem: measures, cost, and the generator name/params it came from.
struct Instance {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  CostMatrix cost;
  std::string name;
  std::map<std::string, double> params;
};

// Drops zero-weight points (and their cost rows/columns), then normalizes.
Instance make_instance(std::vector<double> mu, std::vector<double> nu, const CostMatrix& cost,
                       std::string name = "custom", std::vector<std::string> mu_labels = {},
                       std::vector<std::string> nu_labels = {});

// --- functionals -----------------------------------------------------------

// I_c[pi] = sum pi * c with 0 * inf = 0.
ExtReal plan_cost(const TransportPlan& pi, const CostMatrix& c);

FeasibilityVerdict check_marginals(const TransportPlan& pi, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double tol = kMarginalTol);

// J(phi, psi) as the integral of phi(x) + psi(y) against pi; a mass-bearing
// -inf forces -inf.
ExtReal evaluate_J(const PotentialPair& pp, const TransportPlan& pi);

// J(phi, psi) = sum mu phi + sum nu psi.
ExtReal evaluate_J(const PotentialPair& pp, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// phi(x) + psi(y) <= c(x,y) + tol everywhere.
FeasibilityVerdict check_feasible_potentials(const PotentialPair& pp, const CostMatrix& c, double tol = kFeasTol);
// Same, restricted to the support of `on_support_of`.
FeasibilityVerdict check_feasible_potentials(const PotentialPair& pp, const CostMatrix& c,
                                             const TransportPlan& on_support_of, double tol = kFeasTol);

// (clamp(phi, -n, n), clamp(psi, -n, n)).
PotentialPair truncate_potentials(const PotentialPair& pp, double n);

// c'(x,y) = c(x,y) - a(x) - b(y) under inf - inf = inf. Requires a(x) + b(y) <= c(x,y).
CostMatrix shift_cost(const CostMatrix& c, std::span<const double> a, std::span<const double> b);

// Adds the recorded (a, b) back onto potentials computed for a shifted cost.
PotentialPair unshift_potentials(const PotentialPair& pp, const CostMatrix& shifted);

// sum a mu + sum b nu for a shifted cost (0 when unshifted).
double shift_offset(const CostMatrix& shifted, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace mkdual
