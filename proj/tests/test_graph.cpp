#include "doctest.h"
#include "redistrict/graph.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace redistrict;
using namespace testutil;

namespace {

DualGraph path4() { return make_graph({10, 20, 30, 40}, {{0, 1}, {1, 2}, {2, 3}}); }

Subgraph whole(const DualGraph& g) {
  std::vector<VertexIndex> all(g.vertex_count());
  std::iota(all.begin(), all.end(), 0);
  return induced_subgraph(g, all);
}

}  // namespace

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(make_graph({1, 1}, {{0, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(make_graph({1, 1}, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(make_graph({1, 1}, {{0, 2}}), Error);
  CHECK_THROWS_AS(make_graph({1, -1}, {{0, 1}}), Error);
  CHECK_THROWS_AS(make_graph({1, 1, 1}, {{0, 1}}), DisconnectedGraphError);

  const auto g = path4();
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 3);
  CHECK(g.total_population() == 100);
  CHECK(g.adjacent(1, 2));
  CHECK_FALSE(g.adjacent(0, 2));
  CHECK(g.find("v3") == 3);
  CHECK_FALSE(g.find("nope").has_value());
  CHECK_FALSE(g.has_geometry());
}

TEST_CASE("induced_district_subgraph") {
  const auto g = path4();
  DistrictingPlan plan(g, 2, {0, 0, 1, 1});
  auto s0 = induced_district_subgraph(g, plan, 0);
  CHECK(s0.vertices == std::vector<VertexIndex>{0, 1});
  CHECK(s0.edges() == std::vector<std::pair<VertexIndex, VertexIndex>>{{0, 1}});
  auto s1 = induced_district_subgraph(g, plan, 1);
  CHECK(s1.vertices == std::vector<VertexIndex>{2, 3});
  CHECK(s1.edges() == std::vector<std::pair<VertexIndex, VertexIndex>>{{2, 3}});
  CHECK_THROWS_AS(induced_district_subgraph(g, plan, 2), Error);
  CHECK_THROWS_AS(induced_district_subgraph(g, plan, -1), Error);

  // 3x3 grid, district 0 = the four corners: no two corners touch.
  const auto grid = make_graph(std::vector<Population>(9, 1), grid_edges(3, 3));
  DistrictingPlan corners(grid, 2, {0, 1, 0, 1, 1, 1, 0, 1, 0});
  auto sc = induced_district_subgraph(grid, corners, 0);
  CHECK(sc.size() == 4);
  CHECK(sc.edge_count() == 0);
}

TEST_CASE("is_contiguous") {
  const auto g = path4();
  CHECK(is_contiguous(g, DistrictingPlan(g, 2, {0, 0, 1, 1}), 0));
  CHECK_FALSE(is_contiguous(g, DistrictingPlan(g, 2, {0, 1, 0, 1}), 0));
  CHECK_THROWS_AS(is_contiguous(g, DistrictingPlan(g, 3, {0, 0, 1, 1}), 2), EmptyDistrictError);

  const auto grid = make_graph(std::vector<Population>(9, 1), grid_edges(3, 3));
  DistrictingPlan row(grid, 2, {0, 0, 0, 1, 1, 1, 1, 1, 1});
  CHECK(is_contiguous(grid, row, 0));
  CHECK(all_districts_contiguous(grid, row));
}

TEST_CASE("articulation_points examples") {
  const auto path = make_graph({1, 1, 1}, {{0, 1}, {1, 2}});
  CHECK(articulation_points(whole(path)) == std::vector<VertexIndex>{1});
  const auto tri = make_graph({1, 1, 1}, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(articulation_points(whole(tri)).empty());
  // Bowtie: triangles {0,1,2} and {2,3,4} share vertex 2.
  std::vector<Edge> bow{{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}};
  const auto bowtie = make_graph({1, 1, 1, 1, 1}, bow);
  CHECK(articulation_points(whole(bowtie)) == std::vector<VertexIndex>{2});
  CHECK(brute_cut_vertices(5, bow) == std::vector<VertexIndex>{2});

  const auto single = make_graph({5}, {});
  CHECK(articulation_points(whole(single)).empty());

  const auto g = path4();
  DistrictingPlan split(g, 2, {0, 1, 0, 1});
  CHECK_THROWS_AS(articulation_points(induced_district_subgraph(g, split, 0)), DisconnectedGraphError);
  CHECK_THROWS_AS(articulation_points(Subgraph{}), DisconnectedGraphError);
}

TEST_CASE("articulation_points matches remove-and-count on random graphs") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(gen);
    const double density = std::uniform_real_distribution<double>(0.0, 0.4)(gen);
    auto edges = random_connected_edges(n, density, gen);
    const auto g = make_graph(std::vector<Population>(static_cast<std::size_t>(n), 1), edges);
    REQUIRE(articulation_points(whole(g)) == brute_cut_vertices(n, edges));
  }
}

TEST_CASE("articulation_points on a subset uses global indices") {
  // Path 0-1-2-3-4; subset {1,2,3} has cut vertex 2.
  const auto g = make_graph({1, 1, 1, 1, 1}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const std::vector<VertexIndex> subset{1, 2, 3};
  CHECK(articulation_points(induced_subgraph(g, subset)) == std::vector<VertexIndex>{2});
}

TEST_CASE("border_pairs") {
  const auto g = path4();
  auto pairs = border_pairs(g, DistrictingPlan(g, 2, {0, 0, 1, 1}));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == BorderPair{1, 0, 40});

  // Equal populations: lower index is the "heavy" side.
  const auto eq = make_graph({5, 5}, {{0, 1}});
  CHECK(border_pairs(eq, DistrictingPlan(eq, 2, {1, 0})) == std::vector<BorderPair>{{0, 1, 0}});

  // Three mutually adjacent districts with populations 100 / 80 / 60.
  const auto tri = make_graph({100, 80, 60}, {{0, 1}, {1, 2}, {0, 2}});
  auto tp = border_pairs(tri, DistrictingPlan(tri, 3, {0, 1, 2}));
  CHECK(tp == std::vector<BorderPair>{{0, 2, 40}, {0, 1, 20}, {1, 2, 20}});

  const auto one = make_graph({3, 4}, {{0, 1}});
  CHECK(border_pairs(one, DistrictingPlan(one, 1, {0, 0})).empty());
}

TEST_CASE("plan population cache stays coherent") {
  std::mt19937_64 gen(11);
  const int n = 30;
  auto edges = random_connected_edges(n, 0.1, gen);
  const auto g = make_graph(random_pops(n, 0, 1000, gen), edges);
  DistrictingPlan plan(g, 4);
  CHECK_FALSE(plan.complete());
  for (int step = 0; step < 2000; ++step) {
    const auto v = static_cast<VertexIndex>(std::uniform_int_distribution<int>(0, n - 1)(gen));
    const auto d = static_cast<DistrictIndex>(std::uniform_int_distribution<int>(-1, 3)(gen));
    plan.assign(g, v, d);
    REQUIRE(plan.district_populations() == recomputed_pops(g, plan));
  }
  CHECK_THROWS_AS(plan.assign(g, 0, 4), Error);
  CHECK_THROWS_AS(DistrictingPlan(g, 2, std::vector<DistrictIndex>(3, 0)), Error);
  CHECK_THROWS_AS(DistrictingPlan(g, 2, std::vector<DistrictIndex>(static_cast<std::size_t>(n), 2)), Error);
}

TEST_CASE("canonical assignment ignores district labels") {
  const auto g = path4();
  DistrictingPlan a(g, 2, {0, 0, 1, 1});
  DistrictingPlan b(g, 2, {1, 1, 0, 0});
  CHECK_FALSE(a == b);
  CHECK(a.canonical_assignment() == b.canonical_assignment());
  CHECK(a.canonical_assignment() == std::vector<DistrictIndex>{0, 0, 1, 1});
  CHECK(a.members(1) == std::vector<VertexIndex>{2, 3});
  CHECK(a.district_size(0) == 2);
}
