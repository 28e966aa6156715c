// mkdual: command-line front end to the duality lab.
//
// Exit codes: 0 ok, 1 infeasible or a violated condition (with certificate),
// 2 bad input, 3 internal failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mkdual/gallery.hpp"
#include "mkdual/io.hpp"
#include "mkdual/kernels.hpp"
#include "mkdual/monotonicity.hpp"
#include "mkdual/multimarginal.hpp"
#include "mkdual/potentials.hpp"
#include "mkdual/solver.hpp"
#include "mkdual/subsidy.hpp"
#include "mkdual/verify.hpp"

using namespace mkdual;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kBadInput = 2;
constexpr int kInternal = 3;

struct Options {
  double tolerance = kFeasTol;
  std::string format = "json";
  std::uint64_t seed = 0;
  int parallel = 0;
  bool timing = false;
};

struct Output {
  Json report;
  int code = kOk;
};

Json header(const std::string& command, const std::string& hash, const Options& o) {
  Json r = report_header(command, hash);
  r["tolerance"] = o.tolerance;
  return r;
}

// The plan a command works on: the file's "plan" if present, else the
// northwest-corner plan.
std::pair<TransportPlan, std::string> working_plan(const Problem& p) {
  if (p.plan) return {*p.plan, "input"};
  auto nw = northwest_corner(p.instance.mu, p.instance.nu, p.instance.cost);
  if (!nw) throw InputError("no 'plan' field and the northwest-corner plan puts mass on +inf");
  return {*nw, "northwest-corner"};
}

Output cmd_solve(const Problem& p, const Options& o) {
  const auto& inst = p.instance;
  const auto res = solve_min_cost(inst.mu, inst.nu, inst.cost);
  Output out{header("solve", p.hash, o)};
  out.report.update(solve_json(res));
  if (res.status == SolveStatus::Optimal)
    out.report["potentials"] = potentials_json(potentials_from_support(SupportSet::of(*res.plan), inst.cost));
  else
    out.code = kViolation;
  return out;
}

Output cmd_sweep(const Problem& p, const Options& o, const std::vector<double>& cutoffs) {
  const auto& inst = p.instance;
  Output out{header("sweep", p.hash, o)};
  out.report["value"] = ext_json(solve_min_cost(inst.mu, inst.nu, inst.cost).value.value());
  out.report["sweep"] = sweep_json(truncation_sweep(inst.mu, inst.nu, inst.cost, cutoffs));
  return out;
}

Output cmd_verify_cmon(const Problem& p, const Options& o) {
  const auto [pi, source] = working_plan(p);
  Output out{header("verify-cmon", p.hash, o)};
  out.report["planSource"] = source;
  out.report["plan"] = plan_json(pi);
  const auto cert = check_cyclical_monotonicity(SupportSet::of(pi), p.instance.cost, o.tolerance);
  out.report["monotone"] = !cert.has_value();
  if (cert) {
    out.report["certificates"] = Json::array({cycle_json(*cert, "cycle")});
    out.code = kViolation;
  }
  return out;
}

Output cmd_potentials(const Problem& p, const Options& o) {
  const auto& inst = p.instance;
  Output out{header("potentials", p.hash, o)};
  try {
    if (p.lower) {
      out.report["mode"] = "sandwich";
      out.report["potentials"] = potentials_json(sandwich_potentials({inst.cost, *p.lower}, o.tolerance));
      return out;
    }
    out.report["mode"] = "support";
    TransportPlan pi;
    if (p.plan) {
      pi = *p.plan;
      out.report["planSource"] = "input";
    } else {
      const auto res = solve_min_cost(inst.mu, inst.nu, inst.cost);
      if (res.status != SolveStatus::Optimal) throw InputError("problem is infeasible and no plan was given");
      pi = *res.plan;
      out.report["planSource"] = "solver";
    }
    out.report["plan"] = plan_json(pi);
    const auto pp = potentials_from_support(SupportSet::of(pi), inst.cost);
    out.report["potentials"] = potentials_json(pp);
    out.report["J"] = ext_json(evaluate_J(pp, inst.mu, inst.nu).value());
    out.report["planCost"] = ext_json(plan_cost(pi, inst.cost).value());
  } catch (const CycleViolation& e) {
    out.report["certificates"] = Json::array({cycle_json(e.certificate(), p.lower ? "w3" : "cycle")});
    out.code = kViolation;
  }
  return out;
}

Output cmd_subsidy(const Problem& p, const Options& o) {
  const auto& c = p.instance.cost;
  const auto [pi, source] = working_plan(p);
  const auto sub = compute_subsidy(pi, c);
  Output out{header("subsidy", p.hash, o)};
  out.report["planSource"] = source;
  out.report["plan"] = plan_json(pi);
  out.report["optimum"] = sub.optimum;
  out.report["alpha"] = sub.alpha;
  out.report["totalUnderPlan"] = sub.total_under_plan;
  out.report["maxClamp"] = sub.max_clamp;
  out.report["duals"] = potentials_json(sub.duals);
  out.report["subsidy"] = matrix_json(sub.entries);
  Json constraints, certs = Json::array();
  for (auto tag : {ConstraintTag::W1, ConstraintTag::S1, ConstraintTag::W2, ConstraintTag::S2}) {
    const auto cert = verify_subsidy_constraint(sub.entries, pi, c, tag, o.tolerance);
    constraints[to_string(tag)] = Json{{"holds", !cert.has_value()}};
    if (cert) {
      Json cj = cycle_json(*cert, "constraint");
      cj["tag"] = to_string(tag);
      certs.push_back(std::move(cj));
      out.code = kViolation;
    }
  }
  out.report["constraints"] = std::move(constraints);
  if (!certs.empty()) out.report["certificates"] = std::move(certs);
  return out;
}

Output cmd_decompose(const Problem& p, const Options& o) {
  const auto& c = p.instance.cost;
  Output out{header("decompose", p.hash, o)};
  out.report["maxResidual"] = max_rectangle_residual(c);
  const auto res = decompose_exact(c, o.tolerance);
  if (const auto* pp = std::get_if<PotentialPair>(&res)) {
    out.report["splittable"] = true;
    out.report["potentials"] = potentials_json(*pp);
  } else {
    out.report["splittable"] = false;
    out.report["certificates"] = Json::array({rectangle_json(std::get<RectangleCertificate>(res))});
    out.code = kViolation;
  }
  return out;
}

Output cmd_mm_check(const Problem& p, const Options& o, std::size_t n, std::size_t count) {
  const auto& inst = p.instance;
  const auto [pi, source] = working_plan(p);
  const auto opt = solve_min_cost(DiscreteMeasure::normalized(pi.row_sums()),
                                  DiscreteMeasure::normalized(pi.col_sums()), inst.cost);
  if (opt.status != SolveStatus::Optimal) throw InputError("mm-check: transport problem is infeasible");
  const ExtReal cost = plan_cost(pi, inst.cost);
  if (!cost.is_finite()) throw InputError("mm-check: plan has infinite cost");
  const double alpha = std::max(0.0, cost.value() - opt.value.value());
  const auto e = build_e(inst.cost, SupportSet::of(pi), n);
  const auto cands = candidate_couplings(pi, n, o.seed, count);
  const auto verdict = mm_bound_check(pi, e, alpha, cands);

  Output out{header("mm-check", p.hash, o)};
  out.report["planSource"] = source;
  out.report["plan"] = plan_json(pi);
  out.report["n"] = n;
  out.report["seed"] = o.seed;
  out.report["count"] = count;
  out.report["alpha"] = alpha;
  out.report["bound"] = static_cast<double>(n) * alpha;
  out.report["maxValue"] = verdict.max_value;
  out.report["holds"] = verdict.holds;
  Json rows = Json::array();
  for (const auto& k : cands) {
    const double v = integrate(e, k);
    rows.push_back(Json{{"label", k.label}, {"value", v}, {"withinBound", v <= static_cast<double>(n) * alpha + 1e-8}});
  }
  out.report["couplings"] = std::move(rows);
  if (!verdict.holds) out.code = kViolation;
  return out;
}

Params parse_params(const std::vector<std::string>& kv) {
  Params p;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects key=value, got '" + s + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
      p[s.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw InputError("--param " + s + ": value is not a number");
    }
  }
  return p;
}

Output cmd_example(const std::string& name, const Params& params, const Options& o) {
  const auto r = run_gallery(name, params);
  Json pj;
  for (const auto& [k, v] : r.params) pj[k] = v;
  Output out{header("example", content_hash(name + pj.dump()), o)};
  out.report["name"] = name;
  out.report["params"] = pj;
  out.report["facts"] = facts_json(r);
  out.report["allPass"] = r.all_pass();
  if (!r.all_pass()) out.code = kViolation;
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mkdual: discrete Monge-Kantorovich duality lab"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tolerance", o.tolerance, "Tolerance for cycle and feasibility checks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for randomized candidates")->capture_default_str();
  app.add_option("--parallel", o.parallel, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--timing", o.timing, "Add wall-clock timing to the report (breaks byte-identical output)");

  std::string problem_path = "-";
  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("problem", problem_path, "Problem JSON file, '-' for stdin")->capture_default_str();
    sub->fallthrough();
    return sub;
  };
  auto* solve = add_problem(app.add_subcommand("solve", "Optimal plan, value and dual potentials"));
  auto* sweep = add_problem(app.add_subcommand("sweep", "Optimal values of min(c, n) over cutoffs n"));
  std::vector<double> cutoffs{1, 2, 5, 10, 20, 50, 100};
  sweep->add_option("--cutoffs", cutoffs, "Strictly increasing positive cutoffs")->delimiter(',')->allow_extra_args(false);
  auto* cmon = add_problem(app.add_subcommand("verify-cmon", "Check c-cyclical monotonicity of a plan"));
  auto* pots = add_problem(app.add_subcommand("potentials", "Potentials from a support, or a sandwich pair"));
  auto* subs = add_problem(app.add_subcommand("subsidy", "Subsidy function and constraint verdicts"));
  auto* deco = add_problem(app.add_subcommand("decompose", "Split the cost as phi(x) + psi(y)"));
  auto* mm = add_problem(app.add_subcommand("mm-check", "Multi-marginal bound against candidate couplings"));
  std::size_t mm_n = 2, mm_count = 8;
  mm->add_option("--n", mm_n, "Cycle length")->check(CLI::Range(2, 12))->capture_default_str();
  mm->add_option("--count", mm_count, "Number of candidate couplings")->check(CLI::Range(2, 1000))->capture_default_str();

  auto* example = app.add_subcommand("example", "Run a gallery example and its fact list");
  example->fallthrough();
  std::string example_name;
  std::vector<std::string> example_params;
  bool emit_instance = false;
  example->add_option("name", example_name, "Example name")->required()->check(CLI::IsMember(gallery_names()));
  example->add_option("--param", example_params, "Parameter key=value (repeatable)");
  example->add_flag("--emit-instance", emit_instance, "Print the instance as a problem file instead");

  auto* random = app.add_subcommand("random", "Print a seeded random problem file");
  random->fallthrough();
  std::size_t rn = 0, rm = 0;
  std::uint64_t rseed = 0;
  double inf_density = 0.0;
  random->add_option("n", rn, "Rows")->required()->check(CLI::PositiveNumber);
  random->add_option("m", rm, "Columns")->required()->check(CLI::PositiveNumber);
  random->add_option("seed", rseed, "Seed")->required();
  random->add_option("--inf-density", inf_density, "Probability of a +inf entry")->check(CLI::Range(0.0, 0.999999));

  auto* verify = app.add_subcommand("verify", "Re-check a report's certificates against the input");
  verify->fallthrough();
  std::string report_path;
  std::string verify_problem;
  verify->add_option("report", report_path, "Report JSON")->required();
  verify->add_option("problem", verify_problem, "Problem file the report was made from");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (o.parallel > 0) kernels::set_threads(o.parallel);
    const Format fmt = format_from_string(o.format);
    const auto t0 = std::chrono::steady_clock::now();

    if (random->parsed()) {
      std::cout << instance_json(gen_random(rn, rm, rseed, inf_density)).dump(2) << "\n";
      return kOk;
    }
    if (example->parsed() && emit_instance) {
      std::cout << instance_json(gen_instance(example_name, parse_params(example_params))).dump(2) << "\n";
      return kOk;
    }

    Output out;
    if (example->parsed()) {
      out = cmd_example(example_name, parse_params(example_params), o);
    } else if (verify->parsed()) {
      const Json report = [&] {
        try {
          return Json::parse(read_text(report_path));
        } catch (const nlohmann::json::parse_error& e) {
          throw InputError(report_path + ": " + e.what());
        }
      }();
      std::optional<Problem> prob;
      if (!verify_problem.empty()) prob = parse_instance(verify_problem);
      const auto v = verify_report(prob ? &*prob : nullptr, report, o.tolerance);
      out.report = report_header("verify", prob ? prob->hash : std::string());
      out.report["ok"] = v.ok();
      out.report["checked"] = v.checked;
      out.report["failures"] = v.failures;
      out.code = v.ok() ? kOk : kViolation;
    } else {
      const Problem p = parse_instance(problem_path);
      if (solve->parsed()) out = cmd_solve(p, o);
      else if (sweep->parsed()) out = cmd_sweep(p, o, cutoffs);
      else if (cmon->parsed()) out = cmd_verify_cmon(p, o);
      else if (pots->parsed()) out = cmd_potentials(p, o);
      else if (subs->parsed()) out = cmd_subsidy(p, o);
      else if (deco->parsed()) out = cmd_decompose(p, o);
      else if (mm->parsed()) out = cmd_mm_check(p, o, mm_n, mm_count);
    }

    if (o.timing)
      out.report["timing"] = Json{
          {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
          {"threads", kernels::threads()}};
    std::cout << emit_report(out.report, fmt);
    return out.code;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: malformed report: " << e.what() << "\n";
    return kBadInput;
  } catch (const CycleViolation& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return kViolation;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
