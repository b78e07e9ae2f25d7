#include "doctest.h"
#include "json.hpp"
#include "redistrict/ingest.hpp"
#include "redistrict/pipeline.hpp"
#include "redistrict/plan_io.hpp"
#include "test_util.hpp"

using namespace redistrict;
using namespace testutil;

namespace {

std::shared_ptr<const DualGraph> grid(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return std::make_shared<const DualGraph>(grid_graph(rows, cols, random_pops(rows * cols, 50, 150, gen)));
}

RunConfig base_config(int k) {
  RunConfig c;
  c.k = k;
  c.mi = 30;
  c.li = 100;
  c.seed = 99;
  c.check_invariants = true;
  return c;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t count_fields(const std::string& line) {
  std::size_t fields = 1;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) ++fields;
  }
  return fields;
}

}  // namespace

TEST_CASE("config validation") {
  RunConfig c = base_config(2);
  CHECK_NOTHROW(c.validate());
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = base_config(2);
  c.mi = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = base_config(2);
  c.dev_target = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("plan_violations") {
  const auto g = make_graph({1, 1, 1, 1}, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(plan_violations(g, DistrictingPlan(g, 2, {0, 0, 1, 1})) == 0);
  CHECK(plan_violations(g, DistrictingPlan(g, 2, {0, 1, 0, 1})) > 0);
  CHECK(plan_violations(g, DistrictingPlan(g, 3, {0, 0, 1, 1})) > 0);
  DistrictingPlan partial(g, 2);
  partial.assign(g, 0, 0);
  partial.assign(g, 3, 1);
  CHECK(plan_violations(g, partial) > 0);
}

TEST_CASE("run_once on a grid with a coarsening schedule") {
  const auto g = grid(8, 8, 1);
  RunConfig c = base_config(4);
  c.uc = UncoarseningSchedule::parse("0.5,0.75,1");
  c.refine_harvest = true;
  c.harvest_threshold = 30;
  const auto r = run_once(g, c);
  CHECK(r.coarse_vertices == 32);
  CHECK_FALSE(r.coarsen_stopped_early);
  CHECK(r.invariant_checks > 0);
  CHECK(r.invariant_violations == 0);
  CHECK(r.final.ls_iterations.size() == 3);
  CHECK(r.final.plan.size() == 64);
  CHECK(plan_contiguous(*g, r.final.plan));
  CHECK(r.final.metrics.dev_percent == doctest::Approx(deviation(*g, r.final.plan)));
  REQUIRE(r.final.metrics.mean_compactness.has_value());
  CHECK(r.harvest.size() == r.additional_plans);
  for (const auto& h : r.harvest) {
    CHECK(plan_contiguous(*g, h.plan));
    CHECK(h.metrics.dev_percent == doctest::Approx(deviation(*g, h.plan)));
  }
  CHECK(r.algorithm_s >= r.local_search_s);

  // Same seed, same result.
  const auto again = run_once(g, c);
  CHECK(again.final.plan == r.final.plan);
  CHECK(again.kmedoids_metrics.dev_percent == r.kmedoids_metrics.dev_percent);

  c.k = 65;
  CHECK_THROWS_AS(run_once(g, c), Error);
}

TEST_CASE("run_once without coarsening") {
  const auto g = grid(6, 6, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RunConfig c = base_config(3);
    c.seed = seed;
    const auto r = run_once(g, c);
    CHECK(r.coarse_vertices == 36);
    CHECK(r.final.ls_iterations.size() == 1);
    CHECK(r.invariant_violations == 0);
    CHECK(r.kmedoids_iterations >= 1);
    CHECK(r.kmedoids_iterations <= c.mi);
  }
}

TEST_CASE("ensemble seeds and job-count independence") {
  CHECK(ensemble_seed(7, 0) == mix(7 ^ mix(1)));
  CHECK(ensemble_seed(7, 5) == mix(7 ^ mix(6)));
  CHECK(ensemble_seed(7, 0) != ensemble_seed(7, 1));

  const auto g = grid(6, 7, 3);
  RunConfig c = base_config(3);
  c.uc = UncoarseningSchedule::parse("0.6,1");
  const auto one = run_ensemble(g, c, 6, 1);
  const auto four = run_ensemble(g, c, 6, 4);
  REQUIRE(one.size() == 6);
  REQUIRE(four.size() == 6);
  const std::string hash = graph_hash(*g);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(one[i].seed == ensemble_seed(c.seed, i));
    CHECK(four[i].seed == one[i].seed);
    CHECK(plan_json(*g, hash, one[i].final.plan, one[i].final.metrics, c, one[i].seed) ==
          plan_json(*g, hash, four[i].final.plan, four[i].final.metrics, c, four[i].seed));
  }
  // A single run of the ensemble is run_once with the derived seed.
  RunConfig single = c;
  single.seed = ensemble_seed(c.seed, 2);
  CHECK(run_once(g, single).final.plan == one[2].final.plan);
  CHECK_THROWS_AS(run_ensemble(g, c, 0, 1), Error);
}

TEST_CASE("summarize recomputes the table columns") {
  const auto g = grid(6, 6, 4);
  RunConfig c = base_config(3);
  c.refine_harvest = true;
  c.harvest_threshold = 40;
  const auto reports = run_ensemble(g, c, 5, 2);
  const auto s = summarize(reports, 0.5);
  double kmed = 0, ls = 0, lo = 1e300, alg = 0, total = 0, add = 0, add_dev = 0, comp = 0;
  std::size_t refined = 0;
  for (const auto& r : reports) {
    kmed += r.kmedoids_metrics.dev_percent;
    ls += r.final.metrics.dev_percent;
    lo = std::min(lo, r.final.metrics.dev_percent);
    comp += *r.final.metrics.mean_compactness;
    alg += r.algorithm_s;
    total += r.algorithm_s + r.evaluate_s + 0.5;
    add += static_cast<double>(r.additional_plans);
    for (const auto& h : r.harvest) {
      add_dev += h.metrics.dev_percent;
      ++refined;
    }
  }
  CHECK(s.runs == 5);
  CHECK(s.kmed_mean_dev == doctest::Approx(kmed / 5));
  CHECK(s.ls_mean_dev == doctest::Approx(ls / 5));
  CHECK(s.ls_min_dev == lo);
  CHECK(*s.ls_mean_comp == doctest::Approx(comp / 5));
  CHECK(s.alg_runtime_s == doctest::Approx(alg / 5));
  CHECK(s.total_runtime_s == doctest::Approx(total / 5));
  CHECK(s.additional_mean == doctest::Approx(add / 5));
  if (refined) {
    CHECK(*s.additional_mean_dev == doctest::Approx(add_dev / static_cast<double>(refined)));
  } else {
    CHECK_FALSE(s.additional_mean_dev.has_value());
  }
  CHECK(s.harvest_total_runtime_s >= s.total_runtime_s);

  // CSV rows line up with their headers.
  const auto row = summary_csv_row("IA", c, s);
  CHECK(count_fields(summary_csv_header()) == count_fields(row));
  CHECK(row.rfind("IA,100,\"1\",cmb,", 0) == 0);
  CHECK(count_fields(harvest_csv_header()) == count_fields(harvest_csv_row("IA", c, s)));

  const auto one = summarize({reports[0]});
  CHECK(one.ls_mean_dev == one.ls_min_dev);
}

TEST_CASE("plan json round trip and errors") {
  const auto g = make_graph({10, 20, 30, 40}, {{0, 1}, {1, 2}, {2, 3}});
  const DistrictingPlan plan(g, 2, {0, 0, 0, 1});
  RunConfig c = base_config(2);
  const std::string hash = graph_hash(g);
  const std::string text = plan_json(g, hash, plan, evaluate(g, plan), c, 123);
  CHECK(text == plan_json(g, hash, plan, evaluate(g, plan), c, 123));
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["assignment"]["v3"] == 1);
  CHECK(doc["config"]["nf"] == "cmb");
  CHECK_FALSE(doc.contains("runtime_s"));

  const auto back = parse_plan(text, "p.json", g);
  CHECK(back.plan == plan);
  CHECK(back.graph_hash == hash);
  CHECK(back.seed == 123u);
  CHECK(back.warnings.empty());

  auto error_of = [&](const std::string& t, bool strict = false) {
    try {
      parse_plan(t, "p.json", g, strict);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string bad_id = "{\n  \"k\": 2,\n  \"assignment\": {\n    \"v0\": 0,\n    \"zz\": 1\n  }\n}";
  const auto e1 = error_of(bad_id);
  CHECK(e1.find("p.json:5") != std::string::npos);
  CHECK(e1.find("zz") != std::string::npos);
  const std::string bad_district = "{\n  \"k\": 2,\n  \"assignment\": {\"v0\": 0, \"v1\": 0, \"v2\": 0,\n \"v3\": 2}\n}";
  CHECK(error_of(bad_district).find("p.json:4") != std::string::npos);
  CHECK(error_of(R"({"k": 2, "assignment": {"v0": 0}})").find("not assigned") != std::string::npos);
  CHECK_FALSE(error_of("{\"k\": 2,").empty());
  CHECK_FALSE(error_of(R"({"assignment": {}})").empty());

  nlohmann::json other = doc;
  other["graph_hash"] = "0000";
  const auto warned = parse_plan(other.dump(2), "p.json", g);
  REQUIRE(warned.warnings.size() == 1);
  CHECK(warned.plan == plan);
  CHECK(error_of(other.dump(2), true).find("does not match") != std::string::npos);
}
