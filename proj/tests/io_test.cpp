#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "callab/io.hpp"
#include "test_util.hpp"

using namespace callab;

TEST_CASE("instance round trip preserves everything") {
  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 40; ++trial) {
    HypergraphPrior prior = random_prior(rng);
    std::string text = serialize_instance(prior);
    HypergraphPrior back = parse_instance(text);
    CHECK(serialize_instance(back) == text);
    CHECK(instance_hash(back) == instance_hash(prior));
    CHECK(back.m == prior.m);
    REQUIRE(back.edges.size() == prior.edges.size());
    for (size_t i = 0; i < prior.edges.size(); ++i) {
      CHECK(back.edges[i].first == prior.edges[i].first);
      CHECK(back.edges[i].second.support == prior.edges[i].second.support);
      CHECK(back.edges[i].second.pmf == prior.edges[i].second.pmf);
    }
  }
}

TEST_CASE("instance parsing errors are typed") {
  CHECK_THROWS_AS(parse_instance("this is not json"), parse_error);
  CHECK_THROWS_AS(parse_instance("{\"m\": 2}"), parse_error);
  CHECK_THROWS_AS(
      parse_instance(R"({"m":1,"edges":[],"feasibility":{"kind":"weird"}})"),
      parse_error);
  // invalid distribution surfaces as a parse error too
  CHECK_THROWS_AS(
      parse_instance(
          R"({"m":1,"edges":[{"items":[0],"support":[{"value":1.0,"prob":0.4}]}],"feasibility":{"kind":"all"}})"),
      parse_error);
}

TEST_CASE("explicit feasibility survives the round trip") {
  HypergraphPrior prior(
      3,
      {{Hyperedge({0}), DiscreteDist({0.0, 1.0}, {0.5, 0.5})},
       {Hyperedge({1, 2}), DiscreteDist({0.0, 2.0}, {0.25, 0.75})}},
      FeasibilityFamily::explicit_maximal({Hyperedge({0, 1, 2})}));
  HypergraphPrior back = parse_instance(serialize_instance(prior));
  CHECK(back.feasibility.kind == FeasibilityFamily::Kind::Explicit);
  REQUIRE(back.feasibility.maximal_sets.size() == 1);
  CHECK(back.feasibility.maximal_sets[0] == Hyperedge({0, 1, 2}));
}

TEST_CASE("report CSV layout matches the frozen check list") {
  BenchmarkReport r = check_chain(tu::two_edge_prior());
  REQUIRE(r.checks.size() == chain_check_names().size());
  for (size_t i = 0; i < r.checks.size(); ++i)
    CHECK(r.checks[i].name == chain_check_names()[i]);

  ReportRecord rec;
  rec.instance_id = "two_edge";
  rec.instance_hash = instance_hash(tu::two_edge_prior());
  rec.seed = 7;
  rec.config_hash = "deadbeef00000000";
  rec.status = "ok";
  rec.m = 2;
  rec.has_report = true;
  rec.report = r;
  std::string header = report_csv_header();
  std::string row = report_csv_row(rec);
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
  CHECK(row.find("two_edge") == 0);
  CHECK(header.find("rev_le_single_plus_nonfav_slack") != std::string::npos);
}

TEST_CASE("error rows keep the CSV rectangular") {
  ReportRecord rec;
  rec.instance_id = "broken";
  rec.instance_hash = "0";
  rec.status = "capacity_error";
  rec.m = 5;
  std::string header = report_csv_header();
  std::string row = report_csv_row(rec);
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
}

TEST_CASE("aggregate CSV is deterministic and complete") {
  std::vector<ReportRecord> records;
  std::mt19937_64 rng(403);
  for (int i = 0; i < 5; ++i) {
    HypergraphPrior prior = random_prior(rng);
    ReportRecord rec;
    rec.instance_id = "r" + std::to_string(i);
    rec.instance_hash = instance_hash(prior);
    rec.status = "ok";
    rec.m = prior.m;
    rec.has_report = true;
    rec.report = check_chain(prior);
    records.push_back(std::move(rec));
  }
  std::string a = aggregate_csv(records);
  std::string b = aggregate_csv(records);
  CHECK(a == b);
  for (const auto& name : chain_check_names())
    CHECK(a.find(name + ",") != std::string::npos);
  CHECK(a.find("_instances_ok,5") != std::string::npos);
}

TEST_CASE("solution dump lists supported bundles only") {
  RevenueLP lp = build_lp(tu::two_edge_prior());
  MechanismSolution sol = solve(lp);
  std::string dump = solution_dump(lp, sol);
  CHECK(dump.find("objective ") == 0);
  CHECK(dump.find("payment") != std::string::npos);
}
