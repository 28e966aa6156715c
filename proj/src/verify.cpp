#include "mkdual/verify.hpp"

#include <cmath>
#include <set>

#include "mkdual/multimarginal.hpp"
#include "mkdual/subsidy.hpp"

namespace mkdual {

namespace {

bool close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * (1.0 + std::abs(b));
}

struct Checker {
  VerifyOutcome out;
  void expect(bool ok, const std::string& what) { (ok ? out.checked : out.failures).push_back(what); }
};

const Problem& need(const Problem* p, const std::string& command) {
  if (!p) throw InputError("verify: a '" + command + "' report needs the original problem file");
  return *p;
}

void check_in_support(Checker& ck, const CycleCertificate& cert, const TransportPlan& pi, const std::string& where) {
  bool ok = true;
  for (const auto& [x, y] : cert.pairs) ok = ok && x < pi.rows() && y < pi.cols() && pi(x, y) > 0.0;
  ck.expect(ok, where + ": pairs lie in the plan's support");
}

void check_cycle(Checker& ck, const CycleCertificate& cert, const CostMatrix& upper, const CostMatrix& lower,
                 double tol, const std::string& where) {
  for (const auto& [x, y] : cert.pairs)
    if (x >= upper.rows() || y >= upper.cols()) {
      ck.expect(false, where + ": pair index out of range");
      return;
    }
  if (cert.pairs.empty()) {
    ck.expect(false, where + ": empty chain");
    return;
  }
  const double w = chain_sum(cert.pairs, upper, lower);
  ck.expect(w < -tol, where + ": recomputed chain sum " + format_double(w) + " < -" + format_double(tol));
  ck.expect(close(w, cert.total_weight, 1e-9), where + ": totalWeight matches the recomputed sum");
}

void check_solve(Checker& ck, const Problem& p, const Json& r, double tol) {
  const auto& inst = p.instance;
  const std::string status = r.at("status").get<std::string>();
  if (status == "infeasible") {
    ck.expect(!r.contains("plan"), "infeasible report carries no plan");
    ck.expect(solve_min_cost(inst.mu, inst.nu, inst.cost).status == SolveStatus::Infeasible,
              "problem re-solves as infeasible");
    return;
  }
  const auto pi = plan_from_json(r.at("plan"), inst.cost.rows(), inst.cost.cols(), "plan");
  ck.expect(check_marginals(pi, inst.mu, inst.nu).feasible, "plan marginals match mu and nu within 1e-9");
  const ExtReal cost = plan_cost(pi, inst.cost);
  const double value = ext_from_json(r.at("value"), "value");
  ck.expect(cost.is_finite() && close(cost.value(), value, 1e-9), "plan cost reproduces value");
  if (r.contains("potentials")) {
    const auto pp = potentials_from_json(r["potentials"], "potentials");
    ck.expect(check_feasible_potentials(pp, inst.cost, tol).feasible, "potentials satisfy phi + psi <= c");
    const ExtReal j = evaluate_J(pp, inst.mu, inst.nu);
    ck.expect(j.is_finite() && close(j.value(), value, 1e-8), "J(phi, psi) equals value (optimality witness)");
  }
}

void check_sweep(Checker& ck, const Problem& p, const Json& r) {
  const auto& inst = p.instance;
  std::vector<double> cutoffs, values;
  for (const auto& row : r.at("sweep")) {
    cutoffs.push_back(row.at("cutoff").get<double>());
    values.push_back(ext_from_json(row.at("value"), "sweep.value"));
  }
  const auto again = truncation_sweep(inst.mu, inst.nu, inst.cost, cutoffs);
  bool same = true, monotone = true;
  for (std::size_t k = 0; k < values.size(); ++k) {
    same = same && close(again.values[k], values[k], 1e-9);
    if (k > 0) monotone = monotone && values[k] >= values[k - 1] - 1e-12;
  }
  ck.expect(same, "sweep values reproduce");
  ck.expect(monotone, "sweep values are nondecreasing in the cutoff");
}

void check_potentials_report(Checker& ck, const Problem& p, const Json& r, double tol) {
  const auto& c = p.instance.cost;
  const std::string mode = r.value("mode", std::string("support"));
  if (r.contains("potentials")) {
    const auto pp = potentials_from_json(r["potentials"], "potentials");
    if (mode == "sandwich") {
      if (!p.lower) throw InputError("verify: sandwich report but the problem has no 'lower' field");
      ck.expect(check_feasible_potentials(pp, c, tol).feasible, "phi + psi <= upper");
      bool ok = true;
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) {
          const double lo = (*p.lower)(i, j);
          const double s = ext_add(pp.phi(i), pp.psi(j));
          if (lo != -kInf && s < lo - tol) ok = false;
        }
      ck.expect(ok, "phi + psi >= lower");
    } else {
      const auto pi = plan_from_json(r.at("plan"), c.rows(), c.cols(), "plan");
      ck.expect(verify_strong_monotonicity(pi, c, pp, tol).feasible,
                "phi + psi <= c everywhere, equality on the support");
    }
  }
}

void check_subsidy(Checker& ck, const Problem& p, const Json& r, double tol) {
  const auto& c = p.instance.cost;
  const auto pi = plan_from_json(r.at("plan"), c.rows(), c.cols(), "plan");
  const CostMatrix f = matrix_from_json(r.at("subsidy"), "subsidy");
  bool nonneg = true;
  for (double v : f.data()) nonneg = nonneg && v >= 0.0;
  ck.expect(nonneg, "subsidy is nonnegative");
  const double optimum = r.at("optimum").get<double>();
  const auto again = solve_min_cost(DiscreteMeasure::normalized(pi.row_sums()),
                                    DiscreteMeasure::normalized(pi.col_sums()), c);
  ck.expect(again.status == SolveStatus::Optimal && close(again.value.value(), optimum, 1e-9),
            "optimum reproduces");
  ck.expect(verify_lower_bound(f, pi, c, optimum).feasible, "subsidy pays at least the gap alpha under the plan");
  for (const auto& [tag_name, verdict] : r.at("constraints").items()) {
    const ConstraintTag tag = constraint_from_string(tag_name);
    const bool holds = verdict.at("holds").get<bool>();
    const auto cert = verify_subsidy_constraint(f, pi, c, tag, tol);
    ck.expect(holds == !cert.has_value(), tag_name + ": verdict reproduces");
  }
}

void check_mm(Checker& ck, const Problem& p, const Json& r) {
  const auto& c = p.instance.cost;
  const auto pi = plan_from_json(r.at("plan"), c.rows(), c.cols(), "plan");
  const auto n = r.at("n").get<std::size_t>();
  const auto e = build_e(c, SupportSet::of(pi), n);
  const auto cands = candidate_couplings(pi, n, r.at("seed").get<std::uint64_t>(), r.at("count").get<std::size_t>());
  const auto& listed = r.at("couplings");
  bool same = listed.size() == cands.size();
  for (std::size_t k = 0; same && k < cands.size(); ++k)
    same = close(integrate(e, cands[k]), listed[k].at("value").get<double>(), 1e-12);
  ck.expect(same, "coupling integrals reproduce");
  const double bound = r.at("bound").get<double>();
  bool consistent = true;
  for (const auto& row : listed)
    consistent = consistent && ((row.at("value").get<double>() <= bound + 1e-8) == row.at("withinBound").get<bool>());
  ck.expect(consistent, "bound verdicts consistent with listed values");
}

void check_example(Checker& ck, const Json& r) {
  Params params;
  for (const auto& [k, v] : r.at("params").items()) params[k] = v.get<double>();
  const auto again = run_gallery(r.at("name").get<std::string>(), params);
  const auto& facts = r.at("facts");
  bool same = facts.size() == again.facts.size();
  for (std::size_t k = 0; same && k < again.facts.size(); ++k) {
    const auto& f = again.facts[k];
    same = facts[k].at("pass").get<bool>() == f.pass &&
           close(ext_from_json(facts[k].at("observed"), "observed"), f.observed, 1e-12);
  }
  ck.expect(same, "gallery facts reproduce");
}

void check_certificates(Checker& ck, const Problem* p, const Json& r, double tol) {
  if (!r.contains("certificates")) return;
  const auto& prob = need(p, r.value("command", std::string("?")));
  const auto& c = prob.instance.cost;
  std::optional<TransportPlan> pi;
  if (r.contains("plan")) pi = plan_from_json(r["plan"], c.rows(), c.cols(), "plan");
  std::optional<CostMatrix> f;
  if (r.contains("subsidy")) f = matrix_from_json(r["subsidy"], "subsidy");

  std::size_t k = 0;
  for (const auto& cj : r["certificates"]) {
    const std::string where = "certificates[" + std::to_string(k++) + "]";
    const std::string kind = cj.at("kind").get<std::string>();
    if (kind == "cycle") {
      const auto cert = cycle_from_json(cj, where);
      check_cycle(ck, cert, c, c, tol, where + " (cycle)");
      if (pi) check_in_support(ck, cert, *pi, where);
    } else if (kind == "w3") {
      if (!prob.lower) throw InputError("verify: w3 certificate but the problem has no 'lower' field");
      check_cycle(ck, cycle_from_json(cj, where), c, *prob.lower, tol, where + " (w3)");
    } else if (kind == "rectangle") {
      const auto x = cj.at("x").get<std::size_t>(), y = cj.at("y").get<std::size_t>();
      const auto x2 = cj.at("x2").get<std::size_t>(), y2 = cj.at("y2").get<std::size_t>();
      if (std::max(x, x2) >= c.rows() || std::max(y, y2) >= c.cols()) {
        ck.expect(false, where + " (rectangle): index out of range");
        continue;
      }
      const double res = rectangle_residual(c, x, y, x2, y2);
      ck.expect(std::isfinite(res) && std::abs(res) > tol, where + " (rectangle): |residual| > tol");
      ck.expect(close(res, cj.at("residual").get<double>(), 1e-9), where + " (rectangle): residual matches");
    } else if (kind == "constraint") {
      if (!f || !pi) throw InputError("verify: constraint certificate needs 'subsidy' and 'plan' in the report");
      const ConstraintTag tag = constraint_from_string(cj.at("tag").get<std::string>());
      const auto [upper, lower] = constraint_costs(*f, c, tag);
      const auto cert = cycle_from_json(cj, where);
      check_cycle(ck, cert, upper, lower, tol, where + " (" + to_string(tag) + ")");
      if (tag == ConstraintTag::W1 || tag == ConstraintTag::S1) check_in_support(ck, cert, *pi, where);
    } else {
      ck.expect(false, where + ": unknown certificate kind '" + kind + "'");
    }
  }
}

void check_violations(Checker& ck, const Problem* p, const Json& r, double tol) {
  if (!r.contains("violations") || !r.contains("potentials")) return;
  const auto& c = need(p, "?").instance.cost;
  const auto pp = potentials_from_json(r["potentials"], "potentials");
  std::size_t k = 0;
  for (const auto& v : r["violations"]) {
    const std::string where = "violations[" + std::to_string(k++) + "]";
    const auto i = v.at("row").get<std::size_t>(), j = v.at("col").get<std::size_t>();
    const double slack = ext_sub(c(i, j), ext_add(pp.phi(i), pp.psi(j)));
    ck.expect(slack < -tol, where + ": phi + psi exceeds c");
  }
}

}  // namespace

VerifyOutcome verify_report(const Problem* problem, const Json& report, double tol) {
  Checker ck;
  const std::string command = report.value("command", std::string());
  if (report.contains("tolerance")) tol = report["tolerance"].get<double>();
  if (problem && report.contains("inputHash") && command != "example")
    ck.expect(report["inputHash"].get<std::string>() == problem->hash, "inputHash matches the problem file");

  if (command == "solve") {
    check_solve(ck, need(problem, command), report, tol);
  } else if (command == "sweep") {
    check_sweep(ck, need(problem, command), report);
  } else if (command == "verify-cmon") {
    const auto& p = need(problem, command);
    const auto& c = p.instance.cost;
    const auto pi = plan_from_json(report.at("plan"), c.rows(), c.cols(), "plan");
    const bool monotone = report.at("monotone").get<bool>();
    ck.expect(monotone == !check_cyclical_monotonicity(SupportSet::of(pi), c, tol).has_value(),
              "monotonicity verdict reproduces");
  } else if (command == "potentials") {
    check_potentials_report(ck, need(problem, command), report, tol);
  } else if (command == "subsidy") {
    check_subsidy(ck, need(problem, command), report, tol);
  } else if (command == "decompose") {
    const auto& c = need(problem, command).instance.cost;
    if (report.contains("potentials")) {
      const auto pp = potentials_from_json(report["potentials"], "potentials");
      bool ok = true;
      for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) ok = ok && std::abs(pp.phi(i) + pp.psi(j) - c(i, j)) <= tol;
      ck.expect(ok, "phi (+) psi reproduces the cost");
    }
  } else if (command == "mm-check") {
    check_mm(ck, need(problem, command), report);
  } else if (command == "example") {
    check_example(ck, report);
  } else {
    throw InputError("verify: unknown report command '" + command + "'");
  }
  check_certificates(ck, problem, report, tol);
  check_violations(ck, problem, report, tol);
  return ck.out;
}

}  // namespace mkdual
