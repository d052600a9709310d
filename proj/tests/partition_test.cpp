#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "callab/partition.hpp"
#include "test_util.hpp"

using namespace callab;

namespace {

std::vector<Hyperedge> edges(std::vector<std::vector<int>> sets) {
  std::vector<Hyperedge> out;
  for (auto& s : sets) out.push_back(Hyperedge(s));
  return out;
}

}  // namespace

TEST_CASE("partition_edges: worked examples") {
  auto single = partition_edges(edges({{0}}));
  REQUIRE(single.size() == 1);
  CHECK(single.parts[0] == edges({{0}}));

  // {0,1} is covered by {0,2} u {1,2} and gets its own round.
  auto tri = partition_edges(edges({{0, 1}, {0, 2}, {1, 2}}));
  REQUIRE(tri.size() == 2);
  CHECK(tri.parts[0] == edges({{0, 2}, {1, 2}}));
  CHECK(tri.parts[1] == edges({{0, 1}}));

  // A common item with private partners: one part suffices.
  auto star = partition_edges(edges({{0, 1}, {0, 2}, {0, 3}}));
  CHECK(star.size() == 1);
}

TEST_CASE("partition_edges: duplicate edges rejected") {
  CHECK_THROWS_AS(partition_edges(edges({{0, 1}, {0, 1}})), std::invalid_argument);
}

TEST_CASE("max_degree") {
  CHECK(max_degree(edges({{0, 1}, {0, 2}})) == 2);
  CHECK(max_degree({}) == 0);
  CHECK(max_degree(edges({{0}, {0, 1}, {0, 2}, {0, 3}})) == 4);
}

TEST_CASE("verify_partition: witnesses") {
  auto e = edges({{0, 1}, {0}, {1}});
  EdgePartition bad;
  bad.parts = {e};
  auto v = verify_partition(e, bad);
  REQUIRE(v.has_value());
  CHECK(v->part_index == 0);
  CHECK(v->edge == Hyperedge({0, 1}));

  EdgePartition ok;
  ok.parts = {edges({{0, 1}})};
  CHECK(!verify_partition(edges({{0, 1}}), ok).has_value());

  EdgePartition not_cover;
  not_cover.parts = {edges({{0}})};
  CHECK(verify_partition(edges({{0}, {1}}), not_cover).has_value());
}

TEST_CASE("partition_edges: theorem guarantees on random hypergraphs") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 2 + static_cast<int>(rng() % 9);
    auto e = random_edges(rng, m, 40);
    auto part = partition_edges(e);
    CHECK(!verify_partition(e, part).has_value());
    CHECK(part.size() <= max_degree(e));
  }
}

TEST_CASE("partition_edges: item coverage is preserved round by round") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    auto e = random_edges(rng, 2 + static_cast<int>(rng() % 7), 20);
    auto part = partition_edges(e);
    std::vector<Hyperedge> remaining = e;
    std::sort(remaining.begin(), remaining.end());
    for (const auto& p : part.parts) {
      ItemMask part_cover = 0, remaining_cover = 0;
      for (const auto& edge : p) part_cover |= edge.mask();
      for (const auto& edge : remaining) remaining_cover |= edge.mask();
      CHECK(part_cover == remaining_cover);
      for (const auto& edge : p)
        remaining.erase(std::find(remaining.begin(), remaining.end(), edge));
    }
    CHECK(remaining.empty());
  }
}

TEST_CASE("partition_edges: deterministic") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = random_edges(rng, 6, 15);
    auto a = partition_edges(e);
    auto b = partition_edges(e);
    CHECK(a.parts == b.parts);
  }
}
