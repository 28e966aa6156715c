#include "mkdual/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>

#include "mkdual/kernels.hpp"
#include "mkdual/monotonicity.hpp"
#include "mkdual/potentials.hpp"
#include "mkdual/solver.hpp"

namespace mkdual {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Equal:
      return "==";
    case Relation::AtMost:
      return "<=";
    case Relation::AtLeast:
      return ">=";
  }
  return "?";
}

bool FactReport::all_pass() const {
  return std::all_of(facts.begin(), facts.end(), [](const Fact& f) { return f.pass; });
}

Fact make_fact(std::string description, Relation relation, double expected, double observed, double tolerance,
               std::string basis) {
  Fact f{std::move(description), relation, expected, observed, tolerance, false, std::move(basis)};
  if (std::isnan(observed)) return f;
  switch (relation) {
    case Relation::Equal:
      f.pass = observed == expected || std::abs(observed - expected) <= tolerance;
      break;
    case Relation::AtMost:
      f.pass = observed <= expected + tolerance;
      break;
    case Relation::AtLeast:
      f.pass = observed >= expected - tolerance;
      break;
  }
  return f;
}

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"zero_one_infty", "discrete_omega", "rotation",
                                              "quadratic_shift", "reciprocal",    "no_optimizer"};
  return names;
}

namespace {

const std::map<std::string, Params>& defaults() {
  static const std::map<std::string, Params> d{
      {"zero_one_infty", {{"N", 100}, {"cutoff", 10}}},
      {"discrete_omega", {{"N", 50}, {"r", 0.5}}},
      {"rotation", {{"p", 1}, {"q", 5}}},
      {"quadratic_shift", {{"N", 200}, {"tail", 0}}},
      {"reciprocal", {{"N", 100}}},
      {"no_optimizer", {{"N", 100}}},
  };
  return d;
}

long as_count(const Params& p, const std::string& key, long min_value) {
  const double v = p.at(key);
  if (!std::isfinite(v) || v != std::floor(v) || v < static_cast<double>(min_value) || v > 1e7)
    throw InputError("gallery: parameter " + key + " must be an integer >= " + std::to_string(min_value));
  return static_cast<long>(v);
}

// Uniform grid {k/n}, k = 0..n-1.
std::vector<double> grid(long n, double offset = 0.0) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(n) + offset;
  return g;
}

CostMatrix triangular(std::size_t n) {
  CostMatrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c.set(i, j, i < j ? kInf : (i == j ? 1.0 : 0.0));
  return c;
}

Instance finish(DiscreteMeasure mu, DiscreteMeasure nu, CostMatrix c, const std::string& name, Params params) {
  Instance inst;
  inst.mu = std::move(mu);
  inst.nu = std::move(nu);
  inst.cost = std::move(c);
  inst.name = name;
  inst.params = std::move(params);
  return inst;
}

double reciprocal_cost(long n, std::size_t i, std::size_t j) {
  const double x = static_cast<double>(i + 1) / static_cast<double>(n);
  const double y = static_cast<double>(j + 1) / static_cast<double>(n);
  return std::abs(1.0 / x - 1.0 / y + 1.0);
}

PotentialPair reciprocal_pair(long n) {
  std::vector<double> phi(static_cast<std::size_t>(n));
  std::vector<double> psi(static_cast<std::size_t>(n));
  for (long k = 1; k <= n; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(n);
    phi[static_cast<std::size_t>(k - 1)] = 1.0 / x;
    psi[static_cast<std::size_t>(k - 1)] = 1.0 - 1.0 / x;
  }
  return {std::move(phi), std::move(psi)};
}

SolveResult solve_optimal(const Instance& inst) {
  auto res = solve_min_cost(inst.mu, inst.nu, inst.cost);
  if (res.status != SolveStatus::Optimal) throw InternalError("gallery: " + inst.name + " did not solve");
  return res;
}

// Runs f(k) for every k, one solve per worker; results keep index order.
std::vector<double> sweep(std::size_t count, const std::function<double(std::size_t)>& f) {
  std::vector<double> out(count, 0.0);
  std::exception_ptr err;
  const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = f(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

double increases(const std::vector<double>& v, double tol) {
  double count = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] + tol) ++count;
  return count;
}

double count_finite_permutations(const CostMatrix& c) {
  std::vector<std::size_t> perm(c.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0;
  do {
    bool finite = true;
    for (std::size_t i = 0; i < perm.size() && finite; ++i) finite = c(i, perm[i]) != kInf;
    if (finite) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

double phi_range(const Instance& inst) {
  const auto res = solve_optimal(inst);
  const auto pp = potentials_from_support(SupportSet::of(*res.plan), inst.cost);
  const auto [lo, hi] = std::minmax_element(pp.phi().begin(), pp.phi().end());
  return *hi - *lo;
}

// --- fact lists ------------------------------------------------------------

void facts_zero_one(FactReport& r, const Instance& inst) {
  const long n_pts = static_cast<long>(inst.mu.size());
  const double cutoff = r.params.at("cutoff");
  const auto res = solve_optimal(inst);
  r.facts.push_back(make_fact("I_c = 1", Relation::Equal, 1.0, res.value.value(), 0.0, "closed-form"));

  if (n_pts <= 6) {
    r.facts.push_back(make_fact("finite permutation plans (only the identity)", Relation::Equal, 1.0,
                                count_finite_permutations(inst.cost), 0.0, "brute-force"));
  } else {
    double off = 0.0;
    for (const auto& [i, j] : res.plan->support())
      if (i != j) off += (*res.plan)(i, j);
    r.facts.push_back(make_fact("solver plan mass off the diagonal", Relation::Equal, 0.0, off, 0.0, "closed-form"));
  }

  const CostMatrix capped = inst.cost.capped(cutoff);
  std::vector<std::size_t> shift(static_cast<std::size_t>(n_pts));
  for (long k = 0; k < n_pts; ++k) shift[static_cast<std::size_t>(k)] = static_cast<std::size_t>((k + n_pts - 1) % n_pts);
  const double bound = cutoff / static_cast<double>(n_pts);
  r.facts.push_back(make_fact("shift permutation cost under c^n = n/N", Relation::Equal, bound,
                              plan_cost(TransportPlan::permutation(shift, 1.0 / static_cast<double>(n_pts)), capped)
                                  .value(),
                              1e-12, "closed-form"));
  const std::vector<double> cut{cutoff};
  const auto sw = truncation_sweep(inst.mu, inst.nu, inst.cost, cut);
  r.facts.push_back(make_fact("I_{c^n} <= n/N", Relation::AtMost, bound, sw.values[0], 1e-9, "closed-form"));

  const std::vector<long> ns{20, 50, 100, 200};
  const auto vals = sweep(ns.size(), [&](std::size_t k) {
    const auto sub = gen_instance("zero_one_infty", {{"N", static_cast<double>(ns[k])}, {"cutoff", cutoff}});
    return truncation_sweep(sub.mu, sub.nu, sub.cost, cut).values[0];
  });
  r.facts.push_back(make_fact("I_{c^n} nonincreasing over N in {20,50,100,200} (increases)", Relation::Equal, 0.0,
                              increases(vals, 1e-12), 0.0, "trend"));
  r.facts.push_back(make_fact("I_{c^n} at N=200 <= n/200", Relation::AtMost, cutoff / 200.0, vals.back(), 1e-9,
                              "trend"));
}

void facts_discrete_omega(FactReport& r, const Instance& inst) {
  const double n_pts = r.params.at("N");
  const auto res = solve_optimal(inst);
  r.facts.push_back(make_fact("I_c = 1", Relation::Equal, 1.0, res.value.value(), 1e-12, "closed-form"));
  r.facts.push_back(make_fact("max phi - min phi >= N", Relation::AtLeast, n_pts, phi_range(inst), 1e-6,
                              "closed-form"));

  const std::vector<double> ns{10, 20, 50};
  const auto ranges = sweep(ns.size(), [&](std::size_t k) {
    return phi_range(gen_instance("discrete_omega", {{"N", ns[k]}, {"r", r.params.at("r")}}));
  });
  const auto fit = fit_line(ns, ranges);
  r.facts.push_back(make_fact("phi range slope over N in {10,20,50}", Relation::AtLeast, 1.0, fit.b, 1e-6, "trend"));
  r.facts.push_back(make_fact("phi range linear fit, max relative residual", Relation::AtMost, 0.0,
                              fit.max_rel_residual, 0.05, "trend"));
}

void facts_rotation(FactReport& r, const Instance& inst) {
  const long p = static_cast<long>(r.params.at("p"));
  const long q = static_cast<long>(r.params.at("q"));
  const double w = 1.0 / static_cast<double>(q);
  const auto res = solve_optimal(inst);

  if (q <= 6) {
    r.facts.push_back(make_fact("finite permutation plans (pi_0 and pi_1)", Relation::Equal, 2.0,
                                count_finite_permutations(inst.cost), 0.0, "brute-force"));
  } else {
    double off = 0.0;
    for (const auto& [i, j] : res.plan->support())
      if (j != i && static_cast<long>(j) != static_cast<long>((i + static_cast<std::size_t>(p)) % q))
        off += (*res.plan)(i, j);
    r.facts.push_back(make_fact("solver plan mass off Gamma_0 u Gamma_1", Relation::Equal, 0.0, off, 0.0,
                                "closed-form"));
  }

  std::vector<std::size_t> id(static_cast<std::size_t>(q));
  std::vector<std::size_t> rot(static_cast<std::size_t>(q));
  for (long k = 0; k < q; ++k) {
    id[static_cast<std::size_t>(k)] = static_cast<std::size_t>(k);
    rot[static_cast<std::size_t>(k)] = static_cast<std::size_t>((k + p) % q);
  }
  const double i0 = plan_cost(TransportPlan::permutation(id, w), inst.cost).value();
  const double i1 = plan_cost(TransportPlan::permutation(rot, w), inst.cost).value();
  r.facts.push_back(make_fact("I[pi_1] = 1", Relation::Equal, 1.0, i1, 1e-12, "closed-form"));
  r.facts.push_back(make_fact("I_c = min(I[pi_0], I[pi_1])", Relation::Equal, std::min(i0, i1), res.value.value(),
                              1e-12, "closed-form"));

  long low = 0;
  for (long k = 0; k < q; ++k)
    if (2 * k <= q) ++low;
  const auto drift = rotation_drift(p, q);
  r.facts.push_back(make_fact("psi drift after one orbit = #{x <= 1/2} - #{x > 1/2}", Relation::Equal,
                              static_cast<double>(low - (q - low)), drift.closure, 0.0, "recursion"));
  r.facts.push_back(make_fact("psi oscillation along the orbit", Relation::AtLeast, 1.0, drift.oscillation, 0.0,
                              "recursion"));
}

void facts_quadratic_shift(FactReport& r, const Instance& inst) {
  const double h = 1.0 / r.params.at("N");
  const auto res = solve_optimal(inst);
  r.facts.push_back(make_fact("I_c = 1", Relation::Equal, 1.0, res.value.value(), 1e-12, "closed-form"));

  const std::size_t n = inst.mu.size();
  const auto xs = grid(static_cast<long>(n));
  std::vector<double> a(n), b(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = -2.0 * xs[k];
    b[k] = 2.0 * (xs[k] + 1.0) - 1.0;
  }
  const PotentialPair witness(a, b);
  r.facts.push_back(make_fact("(-2x, 2y-1) violations", Relation::Equal, 0.0,
                              static_cast<double>(check_feasible_potentials(witness, inst.cost, 1e-12).violations.size()),
                              0.0, "closed-form"));
  r.facts.push_back(make_fact("J(-2x, 2y-1) = 1", Relation::Equal, 1.0,
                              evaluate_J(witness, inst.mu, inst.nu).value(), 1e-12, "closed-form"));

  const auto pp = potentials_from_support(SupportSet::of(*res.plan), inst.cost);
  const double beta = a[0] - pp.phi(0);
  double dev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    dev = std::max(dev, std::abs(pp.phi(k) + beta - a[k]));
    dev = std::max(dev, std::abs(pp.psi(k) - beta - b[k]));
  }
  r.facts.push_back(make_fact("solver duals vs (-2x, 2y-1), sup norm / h", Relation::AtMost, 5.0, dev / h, 0.0,
                              "lp-dual"));
}

void facts_reciprocal(FactReport& r, const Instance& inst) {
  const long n = static_cast<long>(r.params.at("N"));
  const auto pair = reciprocal_pair(n);
  r.facts.push_back(make_fact("(1/x, 1-1/y) violations", Relation::Equal, 0.0,
                              static_cast<double>(check_feasible_potentials(pair, inst.cost, 1e-12).violations.size()),
                              0.0, "closed-form"));
  r.facts.push_back(
      make_fact("J(1/x, 1-1/y) = 1", Relation::Equal, 1.0, evaluate_J(pair, inst.mu, inst.nu).value(), 1e-12,
                "closed-form"));
  r.facts.push_back(
      make_fact("I_c = 1", Relation::Equal, 1.0, solve_optimal(inst).value.value(), 1e-12, "closed-form"));

  double harmonic = 0.0;
  for (long k = n; k >= 1; --k) harmonic += 1.0 / static_cast<double>(k);
  r.facts.push_back(make_fact("sum mu |phi| = H_N", Relation::Equal, harmonic, reciprocal_phi_mass(n), 1e-9,
                              "closed-form"));

  const std::vector<long> ns{100, 1000, 10000};
  std::vector<double> logs, masses;
  double bad = 0.0;
  for (long m : ns) {
    logs.push_back(std::log(static_cast<double>(m)));
    masses.push_back(reciprocal_phi_mass(m));
    bad += static_cast<double>(reciprocal_feasibility(m, 1e-12).first);
  }
  r.facts.push_back(make_fact("(1/x, 1-1/y) violations over N in {1e2,1e3,1e4}", Relation::Equal, 0.0, bad, 0.0,
                              "closed-form"));
  const auto fit = fit_line(logs, masses);
  r.facts.push_back(make_fact("sum mu |phi| vs a + b ln N, max relative residual", Relation::AtMost, 0.0,
                              fit.max_rel_residual, 0.05, "trend"));
  r.facts.push_back(make_fact("sum mu |phi| vs a + b ln N, slope b", Relation::Equal, 1.0, fit.b, 0.05, "trend"));
}

void facts_no_optimizer(FactReport& r, const Instance& inst) {
  const long n = static_cast<long>(r.params.at("N"));
  const double w = 1.0 / static_cast<double>(n);
  // Swap neighbours (0,1), (2,3), ...; an odd N rotates the last three.
  std::vector<std::size_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  const long paired = n % 2 == 0 ? n : n - 3;
  for (long k = 0; k + 1 < paired; k += 2) std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(k + 1)]);
  if (n % 2 == 1) std::rotate(perm.end() - 3, perm.end() - 2, perm.end());
  r.facts.push_back(make_fact("neighbour-swap plan cost <= 1/N", Relation::AtMost, w,
                              plan_cost(TransportPlan::permutation(perm, w), inst.cost).value(), 1e-12,
                              "closed-form"));
  r.facts.push_back(
      make_fact("I_c <= 1/N", Relation::AtMost, w, solve_optimal(inst).value.value(), 1e-12, "closed-form"));

  const auto zero = PotentialPair::zeros(inst.mu.size(), inst.nu.size());
  r.facts.push_back(make_fact("zero potentials violations", Relation::Equal, 0.0,
                              static_cast<double>(check_feasible_potentials(zero, inst.cost, 0.0).violations.size()),
                              0.0, "closed-form"));
  r.facts.push_back(make_fact("J(0, 0) = 0", Relation::Equal, 0.0, evaluate_J(zero, inst.mu, inst.nu).value(), 0.0,
                              "closed-form"));

  const std::vector<long> ns{10, 20, 40, 80};
  const auto vals = sweep(ns.size(), [&](std::size_t k) {
    return solve_optimal(gen_instance("no_optimizer", {{"N", static_cast<double>(ns[k])}})).value.value();
  });
  r.facts.push_back(make_fact("I_c - J(0,0) nonincreasing over N in {10,20,40,80} (increases)", Relation::Equal, 0.0,
                              increases(vals, 1e-12), 0.0, "trend"));
  r.facts.push_back(make_fact("I_c - J(0,0) at N=80 <= 1/80", Relation::AtMost, 1.0 / 80.0, vals.back(), 1e-12,
                              "trend"));
}

}  // namespace

Params resolve_params(const std::string& name, const Params& given) {
  const auto it = defaults().find(name);
  if (it == defaults().end()) throw InputError("gallery: unknown example '" + name + "'");
  Params p = it->second;
  for (const auto& [k, v] : given) {
    if (!p.count(k)) throw InputError("gallery: " + name + " has no parameter '" + k + "'");
    p[k] = v;
  }

  if (p.count("N")) as_count(p, "N", 2);
  if (name == "zero_one_infty" && !(p.at("cutoff") > 0.0 && std::isfinite(p.at("cutoff"))))
    throw InputError("gallery: cutoff must be positive");
  if (name == "discrete_omega" && !(p.at("r") > 0.0 && p.at("r") < 1.0))
    throw InputError("gallery: r must lie in (0, 1)");
  if (name == "quadratic_shift" && !(p.at("tail") >= 0.0 && std::isfinite(p.at("tail"))))
    throw InputError("gallery: tail must be >= 0");
  if (name == "rotation") {
    const long q = as_count(p, "q", 2);
    const long pp = as_count(p, "p", 1);
    if (std::gcd(pp, q) != 1) throw InputError("gallery: rotation needs gcd(p, q) = 1");
  }
  return p;
}

Instance gen_instance(const std::string& name, const Params& params) {
  const Params p = resolve_params(name, params);

  if (name == "zero_one_infty") {
    const auto n = static_cast<std::size_t>(as_count(p, "N", 2));
    return finish(DiscreteMeasure::uniform(n), DiscreteMeasure::uniform(n), triangular(n), name, p);
  }
  if (name == "discrete_omega") {
    const long n = as_count(p, "N", 2);
    const double r = p.at("r");
    std::vector<double> w;
    std::vector<std::string> labels;
    for (long k = 1; k <= n + 1; ++k) {
      w.push_back(std::pow(r, static_cast<double>(k)));
      labels.push_back(k <= n ? std::to_string(k) : "omega");
    }
    auto mu = DiscreteMeasure::normalized(w, labels);
    auto nu = DiscreteMeasure::normalized(w, labels);
    return finish(std::move(mu), std::move(nu), triangular(static_cast<std::size_t>(n + 1)), name, p);
  }
  if (name == "rotation") {
    const long q = as_count(p, "q", 2);
    const long step = as_count(p, "p", 1) % q;
    CostMatrix c(static_cast<std::size_t>(q), static_cast<std::size_t>(q), kInf);
    for (long k = 0; k < q; ++k) {
      const auto i = static_cast<std::size_t>(k);
      c.set(i, i, 2 * k <= q ? 0.0 : 2.0);
      c.set(i, static_cast<std::size_t>((k + step) % q), 1.0);
    }
    return finish(DiscreteMeasure::uniform(static_cast<std::size_t>(q)),
                  DiscreteMeasure::uniform(static_cast<std::size_t>(q)), std::move(c), name, p);
  }
  if (name == "quadratic_shift") {
    const long n = as_count(p, "N", 2);
    const double tail = p.at("tail");
    const auto xs = grid(n);
    std::vector<double> w(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k + 1), -tail);
    CostMatrix c(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double d = xs[i] - (xs[j] + 1.0);
        c.set(i, j, d * d);
      }
    return finish(DiscreteMeasure::normalized(w), DiscreteMeasure::normalized(w), std::move(c), name, p);
  }
  if (name == "reciprocal") {
    const long n = as_count(p, "N", 2);
    const auto sz = static_cast<std::size_t>(n);
    CostMatrix c(sz, sz);
    for (std::size_t i = 0; i < sz; ++i)
      for (std::size_t j = 0; j < sz; ++j) c.set(i, j, reciprocal_cost(n, i, j));
    return finish(DiscreteMeasure::uniform(sz), DiscreteMeasure::uniform(sz), std::move(c), name, p);
  }
  // no_optimizer
  const long n = as_count(p, "N", 2);
  const auto xs = grid(n);
  CostMatrix c(xs.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double d = xs[i] - xs[j];
      c.set(i, j, i == j ? 1.0 : d * d);
    }
  return finish(DiscreteMeasure::uniform(xs.size()), DiscreteMeasure::uniform(xs.size()), std::move(c), name, p);
}

FactReport run_gallery(const std::string& name, const Params& params) {
  const Instance inst = gen_instance(name, params);
  FactReport r{name, inst.params, {}};
  if (name == "zero_one_infty")
    facts_zero_one(r, inst);
  else if (name == "discrete_omega")
    facts_discrete_omega(r, inst);
  else if (name == "rotation")
    facts_rotation(r, inst);
  else if (name == "quadratic_shift")
    facts_quadratic_shift(r, inst);
  else if (name == "reciprocal")
    facts_reciprocal(r, inst);
  else
    facts_no_optimizer(r, inst);
  for (auto& f : r.facts) f.description = name + ": " + f.description;
  return r;
}

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw InputError("fit_line: need at least two points of equal length");
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    sxx += (t[k] - mt) * (t[k] - mt);
    sxy += (t[k] - mt) * (y[k] - my);
  }
  if (sxx == 0.0) throw InputError("fit_line: abscissae are all equal");
  LineFit f;
  f.b = sxy / sxx;
  f.a = my - f.b * mt;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double scale = std::max(std::abs(y[k]), 1e-300);
    f.max_rel_residual = std::max(f.max_rel_residual, std::abs(y[k] - (f.a + f.b * t[k])) / scale);
  }
  return f;
}

Drift rotation_drift(long p, long q) {
  if (q < 2 || p < 1 || std::gcd(p, q) != 1) throw InputError("rotation_drift: need q >= 2 and gcd(p, q) = 1");
  long k = 0;
  double psi = 0.0, lo = 0.0, hi = 0.0;
  for (long step = 0; step < q; ++step) {
    psi += 2 * k <= q ? 1.0 : -1.0;
    k = (k + p) % q;
    if (step + 1 < q) {
      lo = std::min(lo, psi);
      hi = std::max(hi, psi);
    }
  }
  return {hi - lo, psi};
}

double reciprocal_phi_mass(long n) {
  if (n < 1) throw InputError("reciprocal_phi_mass: N must be >= 1");
  const auto pair = reciprocal_pair(n);
  const double w = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t k = pair.phi().size(); k-- > 0;) total += w * std::abs(pair.phi(k));
  return total;
}

std::pair<std::size_t, double> reciprocal_feasibility(long n, double tol) {
  if (n < 1) throw InputError("reciprocal_feasibility: N must be >= 1");
  const auto pair = reciprocal_pair(n);
  return kernels::parallel::feasibility_scan_fn(pair.phi(), pair.psi(),
                                                [n](std::size_t i, std::size_t j) { return reciprocal_cost(n, i, j); },
                                                tol);
}

}  // namespace mkdual
