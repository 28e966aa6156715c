#include "mkdual/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

namespace mkdual {

namespace {

std::string read_all(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

std::vector<double> weights_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("field " + field + ": expected a nonempty array of weights");
  std::vector<double> w;
  w.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = field + "[" + std::to_string(k) + "]";
    if (!j[k].is_number()) throw InputError("field " + at + ": expected a number");
    const double v = j[k].get<double>();
    if (!std::isfinite(v) || v < 0.0) throw InputError("field " + at + ": weight must be finite and >= 0");
    w.push_back(v);
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw InputError("field " + field + ": weights sum to " + format_double(sum) + ", expected 1 within 1e-6");
  return w;
}

std::vector<std::string> labels_from_json(const Json& j, const std::string& field, std::size_t n) {
  if (!j.is_array() || j.size() != n)
    throw InputError("field " + field + ": expected " + std::to_string(n) + " labels");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw InputError("field " + field + ": labels must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field ") + key);
  return j.at(key);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_cell(const Json& v) {
  if (v.is_string()) return csv_escape(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number()) return v.dump();
  return csv_escape(v.dump());
}

}  // namespace

std::string format_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json ext_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double ext_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InputError("field " + field + ": expected a number, \"inf\" or \"-inf\"");
}

Json matrix_json(const CostMatrix& c) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < c.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < c.cols(); ++j) row.push_back(ext_json(c(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CostMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("field " + field + ": expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw InputError("field " + field + "[0]: expected a nonempty row");
  const std::size_t cols = j[0].size();
  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_at = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols)
      throw InputError("field " + row_at + ": expected a row of " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k)
      entries.push_back(ext_from_json(j[i][k], row_at + "[" + std::to_string(k) + "]"));
  }
  return CostMatrix(rows, cols, std::move(entries));
}

Json plan_json(const TransportPlan& pi) {
  Json out = Json::array();
  for (const auto& [i, j] : pi.support()) out.push_back(Json::array({i, j, pi(i, j)}));
  return out;
}

TransportPlan plan_from_json(const Json& j, std::size_t rows, std::size_t cols, const std::string& field) {
  TransportPlan pi(rows, cols);
  if (j.is_object() && j.contains("dense")) {
    const auto& d = j["dense"];
    if (!d.is_array() || d.size() != rows) throw InputError("field " + field + ".dense: expected " + std::to_string(rows) + " rows");
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string row_at = field + ".dense[" + std::to_string(i) + "]";
      if (!d[i].is_array() || d[i].size() != cols)
        throw InputError("field " + row_at + ": expected " + std::to_string(cols) + " masses");
      for (std::size_t k = 0; k < cols; ++k) {
        const double m = d[i][k].is_number() ? d[i][k].get<double>() : -1.0;
        if (!(m >= 0.0) || !std::isfinite(m))
          throw InputError("field " + row_at + "[" + std::to_string(k) + "]: mass must be finite and >= 0");
        pi(i, k) = m;
      }
    }
    return pi;
  }
  if (!j.is_array()) throw InputError("field " + field + ": expected [[row, col, mass], ..] or {\"dense\": rows}");
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = field + "[" + std::to_string(k) + "]";
    const auto& t = j[k];
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_unsigned() || !t[1].is_number_unsigned() ||
        !t[2].is_number())
      throw InputError("field " + at + ": expected [row, col, mass]");
    const auto r = t[0].get<std::size_t>();
    const auto c = t[1].get<std::size_t>();
    const double m = t[2].get<double>();
    if (r >= rows || c >= cols) throw InputError("field " + at + ": index out of range");
    if (!(m >= 0.0) || !std::isfinite(m)) throw InputError("field " + at + ": mass must be finite and >= 0");
    pi(r, c) += m;
  }
  return pi;
}

Json potentials_json(const PotentialPair& pp) {
  Json phi = Json::array(), psi = Json::array();
  for (double v : pp.phi()) phi.push_back(ext_json(v));
  for (double v : pp.psi()) psi.push_back(ext_json(v));
  return Json{{"phi", std::move(phi)}, {"psi", std::move(psi)}};
}

PotentialPair potentials_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("phi") || !j.contains("psi"))
    throw InputError("field " + field + ": expected {\"phi\": [..], \"psi\": [..]}");
  std::vector<double> phi, psi;
  for (std::size_t k = 0; k < j["phi"].size(); ++k)
    phi.push_back(ext_from_json(j["phi"][k], field + ".phi[" + std::to_string(k) + "]"));
  for (std::size_t k = 0; k < j["psi"].size(); ++k)
    psi.push_back(ext_from_json(j["psi"][k], field + ".psi[" + std::to_string(k) + "]"));
  return {std::move(phi), std::move(psi)};
}

Json cycle_json(const CycleCertificate& cert, const std::string& kind) {
  Json pairs = Json::array();
  for (const auto& [x, y] : cert.pairs) pairs.push_back(Json::array({x, y}));
  return Json{{"kind", kind}, {"pairs", std::move(pairs)}, {"totalWeight", ext_json(cert.total_weight)}};
}

CycleCertificate cycle_from_json(const Json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("pairs") || !j.contains("totalWeight"))
    throw InputError("field " + field + ": expected {\"pairs\": [..], \"totalWeight\": w}");
  CycleCertificate cert;
  for (std::size_t k = 0; k < j["pairs"].size(); ++k) {
    const auto& p = j["pairs"][k];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned())
      throw InputError("field " + field + ".pairs[" + std::to_string(k) + "]: expected [x, y]");
    cert.pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
  }
  cert.total_weight = ext_from_json(j["totalWeight"], field + ".totalWeight");
  return cert;
}

Json rectangle_json(const RectangleCertificate& r) {
  return Json{{"kind", "rectangle"}, {"x", r.x}, {"y", r.y}, {"x2", r.x2}, {"y2", r.y2}, {"residual", r.residual}};
}

Json violations_json(const std::vector<Violation>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) {
    Json row = v.row == Violation::npos ? Json(nullptr) : Json(v.row);
    Json col = v.col == Violation::npos ? Json(nullptr) : Json(v.col);
    out.push_back(Json{{"row", std::move(row)}, {"col", std::move(col)}, {"slack", ext_json(v.slack)}});
  }
  return out;
}

Json solve_json(const SolveResult& res) {
  Json out;
  out["status"] = to_string(res.status);
  out["value"] = ext_json(res.value.value());
  if (res.plan) out["plan"] = plan_json(*res.plan);
  out["iterations"] = res.iterations;
  return out;
}

Json sweep_json(const SweepResult& sw) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < sw.cutoffs.size(); ++k)
    rows.push_back(Json{{"cutoff", sw.cutoffs[k]}, {"value", ext_json(sw.values[k])}});
  return rows;
}

Json facts_json(const FactReport& r) {
  Json facts = Json::array();
  for (const auto& f : r.facts)
    facts.push_back(Json{{"description", f.description},
                         {"relation", to_string(f.relation)},
                         {"expected", ext_json(f.expected)},
                         {"observed", ext_json(f.observed)},
                         {"tolerance", f.tolerance},
                         {"pass", f.pass},
                         {"basis", f.basis}});
  return facts;
}

Json report_header(const std::string& command, const std::string& input_hash) {
  Json out;
  out["toolVersion"] = kToolVersion;
  out["command"] = command;
  out["inputHash"] = input_hash;
  return out;
}

Format format_from_string(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw InputError("unknown format '" + s + "' (expected json or csv)");
}

std::string emit_report(const Json& report, Format fmt) {
  if (fmt == Format::Json) return report.dump(2) + "\n";

  std::ostringstream os;
  if (report.contains("sweep")) {
    os << "cutoff,value\n";
    for (const auto& row : report["sweep"]) os << csv_cell(row["cutoff"]) << ',' << csv_cell(row["value"]) << '\n';
    return os.str();
  }
  if (report.contains("facts")) {
    os << "description,relation,expected,observed,tolerance,pass,basis\n";
    for (const auto& f : report["facts"])
      os << csv_cell(f["description"]) << ',' << csv_cell(f["relation"]) << ',' << csv_cell(f["expected"]) << ','
         << csv_cell(f["observed"]) << ',' << csv_cell(f["tolerance"]) << ',' << csv_cell(f["pass"]) << ','
         << csv_cell(f["basis"]) << '\n';
    return os.str();
  }
  os << "field,value\n";
  for (const auto& [key, v] : report.items())
    if (v.is_primitive()) os << csv_escape(key) << ',' << csv_cell(v) << '\n';
  return os.str();
}

Problem parse_problem_text(const std::string& text, const std::string& source) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ":" + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": JSON parse error: " + e.what());
  }
  if (!j.is_object()) throw InputError(source + ": top level must be an object");

  try {
    auto mu = weights_from_json(require(j, "mu"), "mu");
    auto nu = weights_from_json(require(j, "nu"), "nu");
    const CostMatrix cost = matrix_from_json(require(j, "cost"), "cost");
    if (cost.rows() != mu.size() || cost.cols() != nu.size())
      throw InputError("field cost: is " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                       " but mu has " + std::to_string(mu.size()) + " and nu " + std::to_string(nu.size()) +
                       " points");
    std::vector<std::string> lmu, lnu;
    if (j.contains("labels")) {
      const auto& l = j["labels"];
      if (!l.is_object()) throw InputError("field labels: expected {\"mu\": [..], \"nu\": [..]}");
      if (l.contains("mu")) lmu = labels_from_json(l["mu"], "labels.mu", mu.size());
      if (l.contains("nu")) lnu = labels_from_json(l["nu"], "labels.nu", nu.size());
    }
    const bool has_zero = std::count(mu.begin(), mu.end(), 0.0) + std::count(nu.begin(), nu.end(), 0.0) > 0;
    if (has_zero && (j.contains("plan") || j.contains("lower")))
      throw InputError("field plan/lower: not supported together with zero weights; drop those points");

    Problem p;
    p.instance = make_instance(std::move(mu), std::move(nu), cost, j.value("name", std::string("custom")),
                               std::move(lmu), std::move(lnu));
    if (j.contains("plan"))
      p.plan = plan_from_json(j["plan"], p.instance.cost.rows(), p.instance.cost.cols(), "plan");
    if (j.contains("lower")) {
      p.lower = matrix_from_json(j["lower"], "lower");
      if (p.lower->rows() != cost.rows() || p.lower->cols() != cost.cols())
        throw InputError("field lower: dimensions differ from cost");
    }
    p.hash = content_hash(text);
    return p;
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

Problem parse_instance(const std::string& path) {
  return parse_problem_text(read_all(path), path == "-" ? "<stdin>" : path);
}

Json instance_json(const Instance& inst) {
  Json mu = Json::array(), nu = Json::array();
  for (double w : inst.mu.weights()) mu.push_back(w);
  for (double w : inst.nu.weights()) nu.push_back(w);
  Json out;
  out["name"] = inst.name;
  out["mu"] = std::move(mu);
  out["nu"] = std::move(nu);
  out["cost"] = matrix_json(inst.cost);
  out["labels"] = Json{{"mu", inst.mu.labels()}, {"nu", inst.nu.labels()}};
  return out;
}

Instance gen_random(std::size_t n, std::size_t m, std::uint64_t seed, double inf_density) {
  if (n < 1 || m < 1) throw InputError("gen_random: n and m must be >= 1");
  if (!(inf_density >= 0.0 && inf_density < 1.0)) throw InputError("gen_random: infDensity must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto draw_weights = [&](std::size_t k) {
    std::vector<double> w(k);
    for (double& v : w) {
      do v = expo(rng);
      while (!(v > 0.0));
    }
    return w;
  };
  auto mu = draw_weights(n);
  auto nu = draw_weights(m);
  std::vector<double> entries(n * m);
  for (double& v : entries) {
    const double cost = unif(rng);
    v = (inf_density > 0.0 && unif(rng) < inf_density) ? kInf : cost;
  }
  Instance inst;
  inst.mu = DiscreteMeasure::normalized(std::move(mu));
  inst.nu = DiscreteMeasure::normalized(std::move(nu));
  inst.cost = CostMatrix(n, m, std::move(entries));
  inst.name = "random";
  inst.params = {{"n", static_cast<double>(n)},
                 {"m", static_cast<double>(m)},
                 {"seed", static_cast<double>(seed)},
                 {"infDensity", inf_density}};
  return inst;
}

}  // namespace mkdual
