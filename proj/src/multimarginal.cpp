#include "mkdual/multimarginal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <random>

#include "mkdual/kernels.hpp"

namespace mkdual {

namespace {

constexpr double kCouplingTol = 1e-9;
constexpr double kExhausted = 1e-15;

std::size_t tuple_count(std::size_t base, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (base != 0 && total > kMaxTuples / base) throw InputError("multimarginal: more than 1e6 tuples");
    total *= base;
  }
  return total;
}

void check_marginals_equal(const MultiCoupling& kappa, std::span<const double> w) {
  for (std::size_t k = 0; k < kappa.n; ++k) {
    const auto m = kappa.marginal(k);
    for (std::size_t z = 0; z < w.size(); ++z)
      if (std::abs(m[z] - w[z]) > kCouplingTol)
        throw InternalError("candidate_couplings: marginal " + std::to_string(k) + " of '" + kappa.label +
                            "' differs from pi");
  }
}

MultiCoupling from_map(std::size_t base, std::size_t n, const std::map<std::size_t, double>& mass, std::string label) {
  MultiCoupling out{base, n, {}, std::move(label)};
  out.atoms.reserve(mass.size());
  for (const auto& [flat, m] : mass)
    if (m > 0.0) out.atoms.emplace_back(flat, m);
  return out;
}

// Couples n copies of w along u in [0, 1): coordinate k walks the base points
// in `orders[k]` with interval lengths w.
MultiCoupling comonotone(std::span<const double> w, const std::vector<std::vector<std::size_t>>& orders,
                         const CyclicGain& index) {
  const std::size_t n = orders.size();
  std::vector<std::size_t> pos(n, 0);
  std::vector<double> left(n);
  for (std::size_t k = 0; k < n; ++k) left[k] = w[orders[k][0]];
  std::map<std::size_t, double> mass;
  std::vector<std::size_t> tuple(n);
  while (true) {
    bool done = false;
    for (std::size_t k = 0; k < n; ++k)
      if (pos[k] >= w.size()) done = true;
    if (done) break;
    double step = kInf;
    for (std::size_t k = 0; k < n; ++k) step = std::min(step, left[k]);
    for (std::size_t k = 0; k < n; ++k) tuple[k] = orders[k][pos[k]];
    if (step > 0.0) mass[index.flat(tuple)] += step;
    for (std::size_t k = 0; k < n; ++k) {
      left[k] -= step;
      if (left[k] <= kExhausted) {
        ++pos[k];
        if (pos[k] < w.size()) left[k] += w[orders[k][pos[k]]];
      }
    }
  }
  return from_map(w.size(), n, mass, "comonotone");
}

}  // namespace

CyclicGain::CyclicGain(std::size_t base, std::size_t n, std::vector<double> values)
    : base_(base), n_(n), values_(std::move(values)) {
  if (values_.size() != tuple_count(base_, n_)) throw InputError("CyclicGain: table size mismatch");
}

std::size_t CyclicGain::flat(std::span<const std::size_t> tuple) const {
  std::size_t f = 0;
  for (auto z : tuple) f = f * base_ + z;
  return f;
}

std::vector<std::size_t> CyclicGain::tuple(std::size_t flat) const {
  std::vector<std::size_t> t(n_);
  for (std::size_t k = n_; k-- > 0;) {
    t[k] = flat % base_;
    flat /= base_;
  }
  return t;
}

std::size_t CyclicGain::shifted(std::size_t flat) const {
  auto t = tuple(flat);
  std::rotate(t.begin(), t.begin() + 1, t.end());
  return this->flat(t);
}

std::vector<double> MultiCoupling::marginal(std::size_t k) const {
  std::vector<double> out(base, 0.0);
  std::size_t div = 1;
  for (std::size_t i = k + 1; i < n; ++i) div *= base;
  for (const auto& [flat, m] : atoms) out[(flat / div) % base] += m;
  return out;
}

CyclicGain build_e(const CostMatrix& c, const SupportSet& support, std::size_t n) {
  if (n < 2) throw InputError("build_e: cycle length must be >= 2");
  if (support.size() == 0) throw InputError("build_e: empty support");
  tuple_count(support.size(), n);
  for (const auto& [x, y] : support.pairs) {
    if (x >= c.rows() || y >= c.cols()) throw InputError("build_e: support pair outside the cost matrix");
    if (!std::isfinite(c(x, y))) throw InputError("build_e: infinite cost on a support pair");
  }
  auto values = kernels::parallel::cyclic_gain(c.data(), c.cols(), support.pairs, n);
  CyclicGain e(support.size(), n, std::move(values));
  for (std::size_t t = 0; t < e.size(); ++t)
    if (std::abs(e[t] - e[e.shifted(t)]) > 1e-12) throw InternalError("build_e: table is not shift invariant");
  return e;
}

std::vector<double> support_weights(const TransportPlan& pi, const SupportSet& support) {
  std::vector<double> w;
  w.reserve(support.size());
  for (const auto& [x, y] : support.pairs) w.push_back(pi(x, y));
  return w;
}

MultiCoupling cyclic_average(const MultiCoupling& kappa) {
  const CyclicGain index(kappa.base, kappa.n, std::vector<double>(tuple_count(kappa.base, kappa.n), 0.0));
  std::map<std::size_t, double> mass;
  const double share = 1.0 / static_cast<double>(kappa.n);
  for (const auto& [flat, m] : kappa.atoms) {
    std::size_t f = flat;
    for (std::size_t s = 0; s < kappa.n; ++s) {
      mass[f] += share * m;
      f = index.shifted(f);
    }
  }
  return from_map(kappa.base, kappa.n, mass, kappa.label + "+shift-avg");
}

std::vector<MultiCoupling> candidate_couplings(const TransportPlan& pi, std::size_t n, std::uint64_t seed,
                                               std::size_t count) {
  if (n < 2) throw InputError("candidate_couplings: n must be >= 2");
  if (count < 2) throw InputError("candidate_couplings: count must be >= 2 (product and diagonal)");
  const auto support = SupportSet::of(pi);
  const std::size_t s = support.size();
  if (s == 0) throw InputError("candidate_couplings: plan has empty support");
  const std::size_t total = tuple_count(s, n);
  const auto w = support_weights(pi, support);
  const CyclicGain index(s, n, std::vector<double>(total, 0.0));

  std::vector<MultiCoupling> out;
  {
    MultiCoupling prod{s, n, {}, "product"};
    prod.atoms.reserve(total);
    for (std::size_t t = 0; t < total; ++t) {
      double m = 1.0;
      for (auto z : index.tuple(t)) m *= w[z];
      prod.atoms.emplace_back(t, m);
    }
    out.push_back(std::move(prod));
  }
  {
    MultiCoupling diag{s, n, {}, "diagonal"};
    for (std::size_t z = 0; z < s; ++z) diag.atoms.emplace_back(index.flat(std::vector<std::size_t>(n, z)), w[z]);
    std::sort(diag.atoms.begin(), diag.atoms.end());
    out.push_back(std::move(diag));
  }

  std::mt19937_64 rng(seed);
  for (std::size_t k = 2; k < count; ++k) {
    std::vector<std::vector<std::size_t>> orders(n, std::vector<std::size_t>(s));
    for (auto& ord : orders) {
      std::iota(ord.begin(), ord.end(), 0);
      for (std::size_t i = s; i-- > 1;) std::swap(ord[i], ord[rng() % (i + 1)]);
    }
    auto kappa = cyclic_average(comonotone(w, orders, index));
    kappa.label = "comonotone-avg-" + std::to_string(k - 2);
    out.push_back(std::move(kappa));
  }

  for (const auto& kappa : out) check_marginals_equal(kappa, w);
  return out;
}

double integrate(const CyclicGain& e, const MultiCoupling& kappa) {
  if (kappa.base != e.base() || kappa.n != e.n()) throw InputError("integrate: coupling and gain table differ in shape");
  double total = 0.0;
  for (const auto& [flat, m] : kappa.atoms) total += m * e[flat];
  return total;
}

BoundVerdict mm_bound_check(const TransportPlan& /*pi*/, const CyclicGain& e, double alpha,
                            const std::vector<MultiCoupling>& candidates, double tol) {
  std::vector<double> values(candidates.size(), 0.0);
  std::exception_ptr err;
  const auto count = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    try {
      values[static_cast<std::size_t>(k)] = integrate(e, candidates[static_cast<std::size_t>(k)]);
    } catch (...) {
#pragma omp critical
      err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  BoundVerdict v;
  const double bound = static_cast<double>(e.n()) * alpha;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    v.max_value = std::max(v.max_value, values[k]);
    if (values[k] > bound + tol) {
      v.holds = false;
      v.violations.push_back({k, candidates[k].label, values[k], bound});
    }
  }
  return v;
}

double cover_excess(const CyclicGain& e, const std::vector<std::vector<double>>& fs) {
  if (fs.size() != e.n()) throw InputError("cover_excess: need one function per coordinate");
  for (const auto& f : fs)
    if (f.size() != e.base()) throw InputError("cover_excess: function length differs from base size");
  return kernels::parallel::cover_excess(e.values(), e.base(), fs);
}

std::vector<double> symmetrize(const std::vector<std::vector<double>>& fs, const CyclicGain* e, double tol) {
  if (fs.empty()) throw InputError("symmetrize: no functions");
  const std::size_t len = fs.front().size();
  for (const auto& f : fs)
    if (f.size() != len) throw InputError("symmetrize: length mismatch");
  if (e && cover_excess(*e, fs) > tol) throw InputError("symmetrize: inputs do not cover e");

  std::vector<double> out(len, 0.0);
  for (const auto& f : fs)
    for (std::size_t z = 0; z < len; ++z) out[z] += f[z];
  for (double& v : out) v /= static_cast<double>(fs.size());

  if (e && cover_excess(*e, std::vector<std::vector<double>>(e->n(), out)) > tol)
    throw InternalError("symmetrize: averaged function no longer covers e");
  return out;
}

}  // namespace mkdual
