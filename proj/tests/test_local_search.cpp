#include <cstdlib>
#include <map>
#include <tuple>

#include "doctest.h"
#include "redistrict/kmedoids.hpp"
#include "redistrict/local_search.hpp"
#include "redistrict/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace redistrict;
using namespace testutil;


TEST_CASE("neighborhood names") {
  CHECK(parse_neighborhood("flip") == Neighborhood::Flip);
  CHECK(parse_neighborhood("swap") == Neighborhood::Swap);
  CHECK(parse_neighborhood(to_string(Neighborhood::Cmb)) == Neighborhood::Cmb);
  CHECK_THROWS_AS(parse_neighborhood("CMB "), Error);
}

TEST_CASE("flip_candidates examples") {
  const auto path = make_graph({10, 20, 30, 40}, {{0, 1}, {1, 2}, {2, 3}});
  DistrictingPlan plan(path, 2, {0, 0, 0, 1});
  CHECK(flip_candidates(path, plan, 0, 1) == std::vector<Move>{{2, kNoVertex, 0, 1}});

  const auto pair = make_graph({3, 4}, {{0, 1}});
  CHECK(flip_candidates(pair, DistrictingPlan(pair, 2, {0, 1}), 1, 0).empty());

  // Ring 0..5 around centre 12, each ring vertex carrying a pendant 6..11.
  // Every ring vertex is a cut vertex of the ring-plus-pendants district.
  std::vector<Edge> e;
  for (int i = 0; i < 6; ++i) {
    e.emplace_back(std::min(i, (i + 1) % 6), std::max(i, (i + 1) % 6));
    e.emplace_back(i, i + 6);
    e.emplace_back(i, 12);
  }
  const auto donut = make_graph(std::vector<Population>(13, 1), e);
  Assignment a(13, 0);
  a[12] = 1;
  const DistrictingPlan dp(donut, 2, a);
  CHECK(flip_candidates(donut, dp, 0, 1).empty());
  CHECK(brute_moves(donut, a, 0, 1, Neighborhood::Flip).empty());
  // The centre alone can not flip either.
  CHECK(flip_candidates(donut, dp, 1, 0).empty());
}

TEST_CASE("swap_candidates examples") {
  const auto path = make_graph({10, 20, 30, 40}, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(swap_candidates(path, DistrictingPlan(path, 2, {0, 0, 1, 1}), 1, 0).empty());

  // 2x3 grid as two strips {0,1,2} | {3,4,5}. The middle vertices are cut
  // vertices; only the crossed corner pairs work.
  const auto grid = make_graph(std::vector<Population>(6, 1), grid_edges(2, 3));
  const Assignment strips{0, 0, 0, 1, 1, 1};
  const DistrictingPlan sp(grid, 2, strips);
  const std::vector<Move> expect{{0, 5, 0, 1}, {2, 3, 0, 1}};
  CHECK(swap_candidates(grid, sp, 0, 1) == expect);
  CHECK(brute_moves(grid, strips, 0, 1, Neighborhood::Swap) == expect);
}

TEST_CASE("candidate sets match brute force") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 15)(gen);
    const auto g = make_graph(random_pops(n, 0, 50, gen), random_connected_edges(n, 0.25, gen));
    const int k = std::uniform_int_distribution<int>(2, std::min(n, 4))(gen);
    const auto plan = grown_plan(g, k, gen);
    for (const auto& bp : border_pairs(g, plan)) {
      auto flips = flip_candidates(g, plan, bp.heavy, bp.light);
      auto swaps = swap_candidates(g, plan, bp.heavy, bp.light);
      std::sort(swaps.begin(), swaps.end(), [](const Move& x, const Move& y) { return std::pair(x.v_out, x.v_in) < std::pair(y.v_out, y.v_in); });
      CHECK(flips == brute_moves(g, plan.assignment(), bp.heavy, bp.light, Neighborhood::Flip));
      CHECK(swaps == brute_moves(g, plan.assignment(), bp.heavy, bp.light, Neighborhood::Swap));
    }
  }
}

TEST_CASE("score_move examples") {
  // Pop* = 50; heavy {v0, v1} = 60, light {v2} = 40.
  const auto g = make_graph({50, 10, 40}, {{0, 1}, {1, 2}});
  const DistrictingPlan p(g, 2, {0, 0, 1});
  CHECK(score_move(g, p, {1, kNoVertex, 0, 1}) == 0.0);

  const auto h = make_graph({30, 30, 40}, {{0, 1}, {1, 2}});
  const DistrictingPlan q(h, 2, {0, 0, 1});
  CHECK(score_move(h, q, {1, kNoVertex, 0, 1}) == doctest::Approx(0.4));
  CHECK(score_key(h, q, {1, kNoVertex, 0, 1}) == 40);

  // Equal exchange: no change from the pair's current 60/40 split.
  const auto s = make_graph({45, 15, 15, 25}, {{0, 1}, {1, 2}, {2, 3}});
  const DistrictingPlan r(s, 2, {0, 0, 1, 1});
  CHECK(score_move(s, r, {1, 2, 0, 1}) == doctest::Approx(0.2));
}

TEST_CASE("tabu list") {
  TabuList t(2);
  const Move m{3, 7, 0, 1};
  t.add(m, 5);
  CHECK(t.is_tabu(m, 5));
  CHECK(t.is_tabu({7, 3, 1, 0}, 7));  // the inverse shares the key
  CHECK_FALSE(t.is_tabu(m, 8));
  CHECK_FALSE(t.is_tabu({3, 7, 0, 2}, 6));
  CHECK_FALSE(t.is_tabu({3, kNoVertex, 0, 1}, 6));
}

TEST_CASE("local_search examples") {
  const auto path = make_graph({10, 20, 30, 40}, {{0, 1}, {1, 2}, {2, 3}});
  LocalSearchConfig flip;
  flip.neighborhood = Neighborhood::Flip;
  flip.max_iterations = 1;
  auto t = local_search(path, DistrictingPlan(path, 2, {0, 0, 1, 1}), flip);
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].move == Move{2, kNoVertex, 1, 0});
  CHECK(t.plan.assignment() == Assignment{0, 0, 0, 1});
  CHECK(t.final_dev == doctest::Approx(20.0));
  CHECK(t.initial_dev == doctest::Approx(40.0));
  CHECK(t.iterations == 1);
  CHECK_FALSE(t.exhausted);

  // With more room the only follow-up undoes the move, which is tabu.
  flip.max_iterations = 10;
  auto t2 = local_search(path, DistrictingPlan(path, 2, {0, 0, 1, 1}), flip);
  CHECK(t2.steps.size() == 1);
  CHECK(t2.exhausted);

  // Already balanced: nothing happens.
  const auto bal = make_graph({50, 50}, {{0, 1}});
  auto t3 = local_search(bal, DistrictingPlan(bal, 2, {0, 1}), LocalSearchConfig{});
  CHECK(t3.iterations == 0);
  CHECK(t3.steps.empty());
  CHECK(t3.plan.assignment() == Assignment{0, 1});

  CHECK_THROWS_AS(local_search(bal, DistrictingPlan(bal, 2), LocalSearchConfig{}), Error);
}

TEST_CASE("local_search applies the exact argmin among valid non-tabu moves") {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 15)(gen);
    const auto g = make_graph(random_pops(n, 1, 60, gen), random_connected_edges(n, std::uniform_real_distribution<double>(0.05, 0.4)(gen), gen));
    const int k = std::uniform_int_distribution<int>(2, 3)(gen);
    const auto start = grown_plan(g, k, gen);
    LocalSearchConfig cfg;
    cfg.max_iterations = std::uniform_int_distribution<int>(1, 40)(gen);
    cfg.neighborhood = static_cast<Neighborhood>(std::uniform_int_distribution<int>(0, 2)(gen));
    cfg.dev_target = trial % 3 == 0 ? 0.0 : 1.0;

    std::vector<Assignment> plans{start.assignment()};
    const auto trace = local_search(g, start, cfg, [&](const DistrictingPlan& p) { plans.push_back(p.assignment()); });
    REQUIRE(plans.size() == trace.steps.size() + 1);
    CHECK(trace.iterations == static_cast<int>(trace.steps.size()));
    CHECK(trace.iterations <= cfg.max_iterations);

    std::map<TabuKey, int> expiry;
    const int tenure = cfg.max_iterations / 10;
    for (std::size_t it = 0; it <= trace.steps.size(); ++it) {
      const Assignment& a = plans[it];
      const DistrictingPlan plan(g, k, a);
      CHECK(plan_contiguous(g, plan));
      if (it == trace.steps.size()) break;
      const auto& step = trace.steps[it];
      // Pairs before the chosen one must have had nothing to offer.
      const auto best = brute_next_move(g, a, k, cfg.neighborhood, expiry, static_cast<int>(it));
      REQUIRE(best.has_value());
      CHECK(step.move == *best);
      long long total = 0;
      for (std::size_t v = 0; v < a.size(); ++v) total += g.population(static_cast<VertexIndex>(v));
      CHECK(step.score == doctest::Approx(static_cast<double>(brute_key(g, a, k, *best)) / static_cast<double>(total)));
      expiry[tabu_key(step.move)] = static_cast<int>(it) + 1 + tenure;
    }
    // Why it stopped.
    if (trace.exhausted) {
      CHECK_FALSE(brute_next_move(g, plans.back(), k, cfg.neighborhood, expiry, trace.iterations).has_value());
      CHECK(trace.final_dev >= cfg.dev_target);
      CHECK(trace.iterations < cfg.max_iterations);
    } else {
      CHECK((trace.final_dev < cfg.dev_target || trace.iterations == cfg.max_iterations));
    }
    CHECK(trace.plan.district_populations() == recomputed_pops(g, trace.plan));
    CHECK(trace.final_dev == doctest::Approx(deviation(g, trace.plan)));
  }
}

TEST_CASE("local_search is deterministic and keeps plans contiguous") {
  std::mt19937_64 gen(53);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(10, 80)(gen);
    const auto g = make_graph(random_pops(n, 1, 1000, gen), random_connected_edges(n, 0.06, gen));
    const int k = std::uniform_int_distribution<int>(2, 6)(gen);
    const auto start = grown_plan(g, k, gen);
    LocalSearchConfig cfg;
    cfg.max_iterations = 200;
    const Population total = g.total_population();
    int checked = 0;
    auto a = local_search(g, start, cfg, [&](const DistrictingPlan& p) {
      ++checked;
      CHECK(p.complete());
      CHECK(plan_contiguous(g, p));
      long long sum = 0;
      for (auto x : recomputed_pops(g, p)) sum += x;
      CHECK(sum == total);
    });
    auto b = local_search(g, start, cfg);
    CHECK(checked == a.iterations);
    CHECK(a.plan == b.plan);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].move == b.steps[i].move);
  }
}
