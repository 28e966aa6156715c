#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "mkdual/io.hpp"
#include "mkdual/verify.hpp"

using namespace mkdual;

namespace {

std::string fixture(const std::string& name) { return std::string(MKDUAL_FIXTURES) + "/" + name; }

std::string error_of(const std::string& text) {
  try {
    parse_problem_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

Json solve_report(const Problem& p) {
  Json r = report_header("solve", p.hash);
  const auto res = solve_min_cost(p.instance.mu, p.instance.nu, p.instance.cost);
  const Json body = solve_json(res);
  for (auto it = body.begin(); it != body.end(); ++it) r[it.key()] = *it;
  if (res.plan) r["potentials"] = potentials_json(potentials_from_support(SupportSet::of(*res.plan), p.instance.cost));
  return r;
}

}  // namespace

TEST(Parse, FixA) {
  const auto p = parse_instance(fixture("fix_a.json"));
  EXPECT_EQ(p.instance.cost.rows(), 2u);
  EXPECT_EQ(p.instance.cost(0, 1), 1.0);
  EXPECT_FALSE(p.plan);
  EXPECT_EQ(p.hash.size(), 16u);
}

TEST(Parse, InfinityStrings) {
  const auto p = parse_instance(fixture("fix_c.json"));
  EXPECT_EQ(p.instance.cost(0, 1), kInf);
  EXPECT_EQ(p.instance.cost(1, 2), kInf);
  EXPECT_EQ(p.instance.cost(2, 0), 0.0);
  EXPECT_EQ(parse_problem_text(R"({"mu":[1],"nu":[1],"cost":[["-inf"]]})").instance.cost(0, 0), -kInf);
}

TEST(Parse, Diagnostics) {
  try {
    parse_instance(fixture("weights_09.json"));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("field mu"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("0.9"), std::string::npos) << e.what();
  }
  EXPECT_NE(error_of("{\"mu\": [1],\n \"nu\": [1,,]}").find(":2:"), std::string::npos);
  EXPECT_NE(error_of(R"({"mu":[1],"nu":[1]})").find("cost"), std::string::npos);
  EXPECT_NE(error_of(R"({"mu":[1],"nu":[1],"cost":[["x"]]})").find("cost[0][0]"), std::string::npos);
  EXPECT_NE(error_of(R"({"mu":[0.5,0.5],"nu":[1],"cost":[[1]]})").find("cost"), std::string::npos);
  EXPECT_NE(error_of(R"({"mu":[-1, 2],"nu":[1],"cost":[[1],[1]]})").find("mu"), std::string::npos);
  EXPECT_THROW(parse_instance("/nonexistent/file.json"), InputError);
}

TEST(Parse, NormalizesWithinTolerance) {
  const auto p = parse_problem_text(R"({"mu":[0.5000004,0.5],"nu":[1],"cost":[[1],[2]]})");
  EXPECT_NEAR(p.instance.mu.weight(0) + p.instance.mu.weight(1), 1.0, 1e-15);
}

TEST(Parse, PlansAndLabels) {
  const auto p = parse_instance(fixture("fix_a_antidiagonal.json"));
  ASSERT_TRUE(p.plan);
  EXPECT_EQ((*p.plan)(0, 1), 0.5);
  const auto d = parse_problem_text(
      R"({"mu":[0.5,0.5],"nu":[0.5,0.5],"cost":[[0,1],[1,0]],"plan":{"dense":[[0.5,0],[0,0.5]]},
          "labels":{"mu":["a","b"],"nu":["c","d"]}})");
  EXPECT_EQ((*d.plan)(1, 1), 0.5);
  EXPECT_EQ(d.instance.mu.labels()[1], "b");
  const auto s = parse_instance(fixture("sandwich_bad.json"));
  ASSERT_TRUE(s.lower);
  EXPECT_EQ((*s.lower)(0, 1), -kInf);
}

TEST(Parse, ZeroWeightsDropped) {
  const auto p = parse_problem_text(R"({"mu":[0.5,0,0.5],"nu":[1],"cost":[[1],[2],[3]]})");
  EXPECT_EQ(p.instance.mu.size(), 2u);
  EXPECT_EQ(p.instance.cost(1, 0), 3.0);
}

TEST(Roundtrip, InstanceJson) {
  const auto p = parse_instance(fixture("fix_c.json"));
  const auto back = parse_problem_text(instance_json(p.instance).dump());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(back.instance.cost(i, j), p.instance.cost(i, j));
}

TEST(Roundtrip, Pieces) {
  const auto pi = TransportPlan::from_rows({{0.25, 0, 0.25}, {0, 0.5, 0}});
  const auto back = plan_from_json(plan_json(pi), 2, 3, "plan");
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(back.data()[i], pi.data()[i]);

  const CycleCertificate cert{{{0, 1}, {1, 0}}, -2.0};
  const auto cj = cycle_json(cert, "cycle");
  EXPECT_EQ(cj["kind"], "cycle");
  EXPECT_EQ(cj["totalWeight"], -2.0);
  const auto cb = cycle_from_json(cj, "c");
  EXPECT_EQ(cb.pairs, cert.pairs);

  const PotentialPair pp({0, -kInf}, {1.5, 2});
  const auto pb = potentials_from_json(potentials_json(pp), "p");
  EXPECT_EQ(pb.phi(1), -kInf);
  EXPECT_EQ(pb.psi(0), 1.5);

  EXPECT_EQ(ext_json(kInf), "inf");
  EXPECT_EQ(ext_from_json(Json("-inf"), "x"), -kInf);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(kInf), "inf");
}

TEST(Report, InfeasibleHasNoPlan) {
  const auto p = parse_instance(fixture("infeasible.json"));
  const auto r = solve_report(p);
  EXPECT_EQ(r["status"], "infeasible");
  EXPECT_FALSE(r.contains("plan"));
  EXPECT_EQ(r["value"], "inf");
  EXPECT_TRUE(verify_report(&p, r).ok());
}

TEST(Report, CsvSweep) {
  const auto p = parse_instance(fixture("fix_c.json"));
  const std::vector<double> cuts{0.5, 1, 2, 5};
  Json r = report_header("sweep", p.hash);
  r["sweep"] = sweep_json(truncation_sweep(p.instance.mu, p.instance.nu, p.instance.cost, cuts));
  const auto csv = emit_report(r, Format::Csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cutoff,value");
  double prev = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    const double v = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(v, prev);
    prev = v;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(verify_report(&p, r).ok());
  EXPECT_EQ(emit_report(r, Format::Json), emit_report(r, Format::Json));
  EXPECT_THROW(format_from_string("xml"), InputError);
}

TEST(Report, CsvFacts) {
  Json r = report_header("example", "");
  FactReport fr{"x", {}, {make_fact("a, b", Relation::AtMost, 1, 0.5, 0, "trend")}};
  r["facts"] = facts_json(fr);
  const auto csv = emit_report(r, Format::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "description,relation,expected,observed,tolerance,pass,basis");
  EXPECT_NE(csv.find("\"a, b\",<=,1,0.5,0,true,trend"), std::string::npos) << csv;
}

TEST(Verify, SolveReportAndTampering) {
  const auto p = parse_instance(fixture("fix_c.json"));
  auto r = solve_report(p);
  const auto ok = verify_report(&p, r);
  EXPECT_TRUE(ok.ok());
  EXPECT_GE(ok.checked.size(), 3u);

  auto wrong_value = r;
  wrong_value["value"] = 0.5;
  EXPECT_FALSE(verify_report(&p, wrong_value).ok());

  auto wrong_hash = r;
  wrong_hash["inputHash"] = "0000000000000000";
  EXPECT_FALSE(verify_report(&p, wrong_hash).ok());

  auto bad_cert = r;
  bad_cert["certificates"] = Json::array({cycle_json({{{0, 0}, {1, 1}}, -1.0}, "cycle")});
  EXPECT_FALSE(verify_report(&p, bad_cert).ok());
}

TEST(GenRandom, Contract) {
  const auto a = gen_random(3, 3, 42, 0.0), b = gen_random(3, 3, 42, 0.0);
  EXPECT_EQ(instance_json(a).dump(), instance_json(b).dump());
  EXPECT_TRUE(a.cost.all_finite());
  double s = 0;
  for (double w : a.mu.weights()) s += w;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NE(instance_json(gen_random(3, 3, 43, 0.0)).dump(), instance_json(a).dump());
  const auto dense = gen_random(20, 20, 1, 0.5);
  int infs = 0;
  for (double v : dense.cost.data()) infs += v == kInf;
  EXPECT_GT(infs, 100);
  EXPECT_LT(infs, 300);
  EXPECT_THROW(gen_random(0, 3, 1, 0), InputError);
  EXPECT_THROW(gen_random(3, 3, 1, 1.0), InputError);
}

TEST(ContentHash, Fnv1a) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
}
