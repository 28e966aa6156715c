#include "mkdual/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mkdual/kernels.hpp"

namespace mkdual {

std::string to_string(ExtReal v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v.value();
  return os.str();
}

namespace {

void require_no_nan(std::span<const double> xs, const char* what) {
  for (double x : xs)
    if (std::isnan(x)) throw InputError(std::string(what) + ": NaN entry");
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
  return out;
}

void require_dims(const TransportPlan& pi, const CostMatrix& c) {
  if (pi.rows() != c.rows() || pi.cols() != c.cols())
    throw InputError("dimension mismatch: plan " + std::to_string(pi.rows()) + "x" + std::to_string(pi.cols()) +
                     " vs cost " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
}

}  // namespace

// --- DiscreteMeasure -------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights, std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  if (weights_.empty()) throw InputError("measure: no points");
  if (labels_.empty()) labels_ = default_labels(weights_.size());
  if (labels_.size() != weights_.size()) throw InputError("measure: label count differs from weight count");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw InputError("measure: weight " + std::to_string(i) + " is not a positive real");
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > kNormTol) throw InputError("measure: weights sum to " + to_string(sum) + ", not 1");
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t n) {
  if (n == 0) throw InputError("measure: no points");
  return DiscreteMeasure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<double> weights, std::vector<std::string> labels) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (!(sum > 0.0) || !std::isfinite(sum)) throw InputError("measure: weights do not have a positive finite sum");
  for (double& w : weights) w /= sum;
  return DiscreteMeasure(std::move(weights), std::move(labels));
}

// --- CostMatrix ------------------------------------------------------------

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (std::isnan(fill)) throw InputError("cost: NaN entry");
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw InputError("cost: entry count does not match dimensions");
  require_no_nan(data_, "cost");
}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.front().size() : 0;
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw InputError("cost: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return CostMatrix(n, m, std::move(data));
}

void CostMatrix::set(std::size_t i, std::size_t j, double v) {
  if (std::isnan(v)) throw InputError("cost: NaN entry");
  data_[i * cols_ + j] = v;
}

CostMatrix CostMatrix::capped(double n) const {
  CostMatrix out = *this;
  out.shift_.reset();
  for (double& v : out.data_) v = std::min(v, n);
  return out;
}

bool CostMatrix::is_primal() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

bool CostMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double CostMatrix::max_finite() const {
  double best = -kInf;
  for (double v : data_)
    if (std::isfinite(v)) best = std::max(best, v);
  return best;
}

// --- TransportPlan ---------------------------------------------------------

TransportPlan::TransportPlan(std::size_t rows, std::size_t cols, std::vector<double> mass)
    : rows_(rows), cols_(cols), mass_(std::move(mass)) {
  if (mass_.size() != rows * cols) throw InputError("plan: entry count does not match dimensions");
  for (double v : mass_)
    if (!std::isfinite(v)) throw InputError("plan: non-finite mass");
}

TransportPlan TransportPlan::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.front().size() : 0;
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw InputError("plan: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return TransportPlan(n, m, std::move(data));
}

TransportPlan TransportPlan::diagonal(const DiscreteMeasure& mu) {
  TransportPlan p(mu.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) p(i, i) = mu.weight(i);
  return p;
}

TransportPlan TransportPlan::permutation(std::span<const std::size_t> perm, double mass_per_row) {
  TransportPlan p(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) p(i, perm[i]) = mass_per_row;
  return p;
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j);
  return out;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[j] += (*this)(i, j);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> TransportPlan::support() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) > 0.0) out.emplace_back(i, j);
  return out;
}

// --- PotentialPair ---------------------------------------------------------

PotentialPair::PotentialPair(std::vector<double> phi, std::vector<double> psi)
    : phi_(std::move(phi)), psi_(std::move(psi)) {
  for (const auto* v : {&phi_, &psi_})
    for (double x : *v)
      if (std::isnan(x) || x == kInf) throw InputError("potentials: entries must lie in [-inf, inf)");
}

// --- Instance --------------------------------------------------------------

Instance make_instance(std::vector<double> mu, std::vector<double> nu, const CostMatrix& cost, std::string name,
                       std::vector<std::string> mu_labels, std::vector<std::string> nu_labels) {
  if (cost.rows() != mu.size() || cost.cols() != nu.size())
    throw InputError("instance: cost is " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                     " but measures have " + std::to_string(mu.size()) + " and " + std::to_string(nu.size()) +
                     " points");
  if (mu_labels.empty()) mu_labels = default_labels(mu.size());
  if (nu_labels.empty()) nu_labels = default_labels(nu.size());
  if (mu_labels.size() != mu.size() || nu_labels.size() != nu.size())
    throw InputError("instance: label count differs from weight count");

  std::vector<std::size_t> keep_r, keep_c;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0.0 || std::isnan(mu[i])) throw InputError("instance: negative weight in mu[" + std::to_string(i) + "]");
    if (mu[i] > 0.0) keep_r.push_back(i);
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (nu[j] < 0.0 || std::isnan(nu[j])) throw InputError("instance: negative weight in nu[" + std::to_string(j) + "]");
    if (nu[j] > 0.0) keep_c.push_back(j);
  }

  std::vector<double> w_mu, w_nu, entries;
  std::vector<std::string> l_mu, l_nu;
  for (auto i : keep_r) {
    w_mu.push_back(mu[i]);
    l_mu.push_back(mu_labels[i]);
  }
  for (auto j : keep_c) {
    w_nu.push_back(nu[j]);
    l_nu.push_back(nu_labels[j]);
  }
  entries.reserve(keep_r.size() * keep_c.size());
  for (auto i : keep_r)
    for (auto j : keep_c) entries.push_back(cost(i, j));

  Instance out;
  out.mu = DiscreteMeasure::normalized(std::move(w_mu), std::move(l_mu));
  out.nu = DiscreteMeasure::normalized(std::move(w_nu), std::move(l_nu));
  out.cost = CostMatrix(keep_r.size(), keep_c.size(), std::move(entries));
  out.name = std::move(name);
  return out;
}

// --- functionals -----------------------------------------------------------

ExtReal plan_cost(const TransportPlan& pi, const CostMatrix& c) {
  require_dims(pi, c);
  return ExtReal(kernels::parallel::plan_cost(pi.data(), c.data(), c.cols()));
}

FeasibilityVerdict check_marginals(const TransportPlan& pi, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                   double tol) {
  FeasibilityVerdict v;
  if (pi.rows() != mu.size() || pi.cols() != nu.size()) {
    v.add({Violation::npos, Violation::npos, -kInf});
    return v;
  }
  for (std::size_t i = 0; i < pi.rows(); ++i)
    for (std::size_t j = 0; j < pi.cols(); ++j)
      if (pi(i, j) < 0.0) v.add({i, j, pi(i, j)});
  const auto rs = pi.row_sums();
  const auto cs = pi.col_sums();
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (std::abs(rs[i] - mu.weight(i)) > tol) v.add({i, Violation::npos, -std::abs(rs[i] - mu.weight(i))});
  for (std::size_t j = 0; j < cs.size(); ++j)
    if (std::abs(cs[j] - nu.weight(j)) > tol) v.add({Violation::npos, j, -std::abs(cs[j] - nu.weight(j))});
  return v;
}

ExtReal evaluate_J(const PotentialPair& pp, const TransportPlan& pi) {
  if (pp.phi().size() != pi.rows() || pp.psi().size() != pi.cols())
    throw InputError("evaluate_J: potentials do not match plan dimensions");
  return ExtReal(kernels::parallel::pair_integral(pi.data(), pp.phi(), pp.psi()).total());
}

ExtReal evaluate_J(const PotentialPair& pp, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (pp.phi().size() != mu.size() || pp.psi().size() != nu.size())
    throw InputError("evaluate_J: potentials do not match measure dimensions");
  kernels::SplitSum s;
  auto add = [&s](double w, double v) {
    if (v == -kInf)
      s.negative = -kInf;
    else if (v >= 0.0)
      s.positive += w * v;
    else if (s.negative != -kInf)
      s.negative += w * v;
  };
  for (std::size_t i = 0; i < mu.size(); ++i) add(mu.weight(i), pp.phi(i));
  for (std::size_t j = 0; j < nu.size(); ++j) add(nu.weight(j), pp.psi(j));
  return ExtReal(s.total());
}

FeasibilityVerdict check_feasible_potentials(const PotentialPair& pp, const CostMatrix& c, double tol) {
  if (pp.phi().size() != c.rows() || pp.psi().size() != c.cols())
    throw InputError("check_feasible_potentials: dimension mismatch");
  FeasibilityVerdict v;
  v.violations = kernels::parallel::feasibility_scan(pp.phi(), pp.psi(), c.data(), {}, tol);
  v.feasible = v.violations.empty();
  return v;
}

FeasibilityVerdict check_feasible_potentials(const PotentialPair& pp, const CostMatrix& c,
                                             const TransportPlan& on_support_of, double tol) {
  if (pp.phi().size() != c.rows() || pp.psi().size() != c.cols())
    throw InputError("check_feasible_potentials: dimension mismatch");
  require_dims(on_support_of, c);
  FeasibilityVerdict v;
  v.violations = kernels::parallel::feasibility_scan(pp.phi(), pp.psi(), c.data(), on_support_of.data(), tol);
  v.feasible = v.violations.empty();
  return v;
}

PotentialPair truncate_potentials(const PotentialPair& pp, double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError("truncate_potentials: n must be a positive real");
  auto clamp = [n](std::span<const double> xs) {
    std::vector<double> out(xs.begin(), xs.end());
    for (double& x : out) x = std::clamp(x, -n, n);
    return out;
  };
  return {clamp(pp.phi()), clamp(pp.psi())};
}

CostMatrix shift_cost(const CostMatrix& c, std::span<const double> a, std::span<const double> b) {
  if (a.size() != c.rows() || b.size() != c.cols()) throw InputError("shift_cost: dimension mismatch");
  for (double x : a)
    if (!std::isfinite(x)) throw InputError("shift_cost: a must be finite");
  for (double y : b)
    if (!std::isfinite(y)) throw InputError("shift_cost: b must be finite");

  CostMatrix out(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const double v = ext_sub(ext_sub(c(i, j), a[i]), b[j]);
      if (v < -kFeasTol)
        throw InputError("shift_cost: a(x)+b(y) > c(x,y) at (" + std::to_string(i) + "," + std::to_string(j) +
                         "), excess " + to_string(-v));
      out.data_[i * c.cols() + j] = std::max(v, 0.0);
    }
  }
  out.shift_.emplace(std::vector<double>(a.begin(), a.end()), std::vector<double>(b.begin(), b.end()));
  return out;
}

PotentialPair unshift_potentials(const PotentialPair& pp, const CostMatrix& shifted) {
  if (!shifted.shifted()) return pp;
  const auto& [a, b] = *shifted.shift();
  if (a.size() != pp.phi().size() || b.size() != pp.psi().size())
    throw InputError("unshift_potentials: dimension mismatch");
  std::vector<double> phi(pp.phi().begin(), pp.phi().end());
  std::vector<double> psi(pp.psi().begin(), pp.psi().end());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += a[i];
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] += b[j];
  return {std::move(phi), std::move(psi)};
}

double shift_offset(const CostMatrix& shifted, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!shifted.shifted()) return 0.0;
  const auto& [a, b] = *shifted.shift();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * mu.weight(i);
  for (std::size_t j = 0; j < b.size(); ++j) s += b[j] * nu.weight(j);
  return s;
}

}  // namespace mkdual
