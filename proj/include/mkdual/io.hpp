#pragma once

// Problem files, random instances and report serialization.
//
// Problem file:
//   {"mu": [..], "nu": [..], "cost": [[..], ..],
//    "labels": {"mu": [..], "nu": [..]},      optional
//    "plan": [[i, j, mass], ..] or {"dense": rows}, optional
//    "lower": [[..], ..]}                       optional, lower cost for sandwiches
// Cost entries are numbers or the strings "inf" / "-inf". Reports use the
// same encoding for infinite values.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "mkdual/core.hpp"
#include "mkdual/gallery.hpp"
#include "mkdual/monotonicity.hpp"
#include "mkdual/potentials.hpp"
#include "mkdual/solver.hpp"

namespace mkdual {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr double kWeightSumTol = 1e-6;

struct Problem {
  Instance instance;
  std::optional<TransportPlan> plan;
  std::optional<CostMatrix> lower;
  std::string hash;  // of the raw input bytes
};

// Reads a problem file; "-" reads stdin. InputError messages name the field
// or the line:column of a JSON syntax error.
Problem parse_instance(const std::string& path);
Problem parse_problem_text(const std::string& text, const std::string& source = "<input>");

// Instance -> problem JSON (plan and lower omitted).
Json instance_json(const Instance& inst);

// Dirichlet(1) weights, i.i.d. uniform [0, 1) costs, each entry +inf with
// probability inf_density. Same arguments give the same instance.
Instance gen_random(std::size_t n, std::size_t m, std::uint64_t seed, double inf_density);

// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(const std::string& bytes);

// --- report pieces ---------------------------------------------------------

Json ext_json(double v);
double ext_from_json(const Json& j, const std::string& field);
Json matrix_json(const CostMatrix& c);
CostMatrix matrix_from_json(const Json& j, const std::string& field);
Json plan_json(const TransportPlan& pi);  // sparse [i, j, mass] triplets, row-major
TransportPlan plan_from_json(const Json& j, std::size_t rows, std::size_t cols, const std::string& field);
Json potentials_json(const PotentialPair& pp);
PotentialPair potentials_from_json(const Json& j, const std::string& field);
Json cycle_json(const CycleCertificate& cert, const std::string& kind);
CycleCertificate cycle_from_json(const Json& j, const std::string& field);
Json rectangle_json(const RectangleCertificate& r);
Json violations_json(const std::vector<Violation>& vs);
Json solve_json(const SolveResult& res);
Json sweep_json(const SweepResult& sw);
Json facts_json(const FactReport& r);

// Header fields shared by every report.
Json report_header(const std::string& command, const std::string& input_hash);

enum class Format { Json, Csv };
Format format_from_string(const std::string& s);

// JSON: the report as an indented document. CSV: the sweep table
// ("cutoff,value"), the fact table, or "field,value" rows of the scalar
// top-level fields.
std::string emit_report(const Json& report, Format fmt);

// Shortest round-trip decimal form, "inf" / "-inf" for infinities.
std::string format_double(double v);

}  // namespace mkdual
