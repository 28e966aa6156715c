#pragma once

// Discretized counterexamples with machine-checkable facts.
//
//   zero_one_infty   N   uniform grid, +inf above the diagonal, 1 on it, 0 below
//   discrete_omega   N r points 1..N and a top point w, geometric weights r^k
//   rotation         p q q-cycle, x -> x + p/q
//   quadratic_shift  N tail  (x - y)^2 from {k/N} to {k/N + 1}
//   reciprocal       N   |1/x - 1/y + 1| on {1/N, ..., 1}
//   no_optimizer     N   (x - y)^2 off the diagonal, 1 on it
//
// Facts that only hold in the continuum show up as trends over a sweep in N.

#include <map>
#include <string>
#include <vector>

#include "mkdual/core.hpp"

namespace mkdual {

using Params = std::map<std::string, double>;

enum class Relation { Equal, AtMost, AtLeast };

const char* to_string(Relation r);

struct Fact {
  std::string description;
  Relation relation = Relation::Equal;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // How `expected` is known: "closed-form", "brute-force", "lp-dual", "recursion" or "trend".
  std::string basis;
};

struct FactReport {
  std::string name;
  Params params;
  std::vector<Fact> facts;

  [[nodiscard]] bool all_pass() const;
};

// Applies `relation` at `tolerance` and fills `pass`.
Fact make_fact(std::string description, Relation relation, double expected, double observed, double tolerance,
               std::string basis);

// Names accepted by gen_instance / run_gallery.
const std::vector<std::string>& gallery_names();

// Missing params take the defaults below; unknown keys are rejected.
//   zero_one_infty  N=100 cutoff=10
//   discrete_omega  N=50 r=0.5
//   rotation        p=1 q=5
//   quadratic_shift N=200 tail=0   (weights proportional to (k+1)^-tail)
//   reciprocal      N=100
//   no_optimizer    N=100
Params resolve_params(const std::string& name, const Params& given);

Instance gen_instance(const std::string& name, const Params& params = {});

FactReport run_gallery(const std::string& name, const Params& params = {});

// Pieces of the fact lists, exposed for tests and the acceptance suite.

// Least-squares fit y = a + b * t; returns {a, b, max relative residual}.
struct LineFit {
  double a = 0.0;
  double b = 0.0;
  double max_rel_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y);

// Replays psi(x + p/q) = psi(x) + 1 (x <= 1/2) or psi(x) - 1 (x > 1/2) along
// the orbit of 0, q steps.
struct Drift {
  double oscillation = 0.0;  // max psi - min psi over the orbit
  double closure = 0.0;      // psi after q steps minus psi(0)
};
Drift rotation_drift(long p, long q);

// sum mu |phi| for the pair (1/x, 1 - 1/y) on reciprocal(N).
double reciprocal_phi_mass(long n);

// Feasibility of (1/x, 1 - 1/y) on reciprocal(N) without materializing the
// cost: {violations at tol, worst slack}.
std::pair<std::size_t, double> reciprocal_feasibility(long n, double tol);

}  // namespace mkdual
