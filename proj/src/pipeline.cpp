#include "redistrict/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <set>
#include <thread>

namespace redistrict {

void RunConfig::validate() const {
  if (k < 1) throw Error("config: k must be at least 1");
  if (mi < 1) throw Error("config: mi must be at least 1");
  if (li < 1) throw Error("config: li must be at least 1");
  if (!(dev_target > 0.0)) throw Error("config: dev_target must be positive");
  if (!(harvest_threshold > 0.0)) throw Error("config: harvest_threshold must be positive");
}

std::size_t plan_violations(const DualGraph& graph, const DistrictingPlan& plan) {
  std::size_t bad = 0;
  if (plan.size() != graph.vertex_count()) return 1;
  if (!plan.complete()) ++bad;
  std::vector<Population> pops(static_cast<std::size_t>(plan.k()), 0);
  Population assigned = 0;
  for (std::size_t v = 0; v < plan.size(); ++v) {
    const DistrictIndex d = plan.district(static_cast<VertexIndex>(v));
    if (d == kUnassigned) continue;
    pops[static_cast<std::size_t>(d)] += graph.population(static_cast<VertexIndex>(v));
    assigned += graph.population(static_cast<VertexIndex>(v));
  }
  if (pops != plan.district_populations()) ++bad;
  if (plan.complete() && assigned != graph.total_population()) ++bad;
  for (DistrictIndex d = 0; d < plan.k(); ++d) {
    if (plan.district_size(d) == 0 || !is_contiguous(graph, plan, d)) ++bad;
  }
  return bad;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Checker {
  const RunConfig& config;
  RunReport& report;
  void operator()(const DualGraph& graph, const DistrictingPlan& plan) const {
    if (!config.check_invariants) return;
    ++report.invariant_checks;
    report.invariant_violations += plan_violations(graph, plan);
  }
};

RefinedPlan refine(const CoarseLevel& start, DistrictingPlan plan, const RunConfig& config, const Checker& check) {
  const auto t0 = Clock::now();
  const LocalSearchConfig ls{config.li, config.nf, config.dev_target};
  CoarseLevel level = start;
  RefinedPlan out{plan, {}, {}, 0.0};

  auto search = [&] {
    const DualGraph& g = *level.graph;
    std::function<void(const DistrictingPlan&)> on_move;
    if (config.check_invariants) on_move = [&](const DistrictingPlan& p) { check(g, p); };
    auto trace = local_search(g, std::move(plan), ls, on_move);
    out.ls_iterations.push_back(trace.iterations);
    plan = std::move(trace.plan);
  };

  search();
  const std::size_t n = level.history->original_size();
  for (std::size_t i = 1; i < config.uc.fractions().size(); ++i) {
    const double f = config.uc.fractions()[i];
    if (target_vertex_count(f, n) > level.graph->vertex_count()) {
      auto [lifted, lifted_plan] = uncoarsen_to(level, plan, f);
      level = std::move(lifted);
      plan = std::move(lifted_plan);
      check(*level.graph, plan);
    }
    search();
  }
  if (level.graph->vertex_count() != n) throw Error("refine: schedule did not restore the full graph");
  out.runtime_s = seconds_since(t0);
  out.plan = std::move(plan);
  return out;
}

}  // namespace

RunReport run_once(std::shared_ptr<const DualGraph> graph, const RunConfig& config) {
  config.validate();
  RunReport report;
  report.seed = config.seed;
  const Checker check{config, report};
  Rng rng(config.seed);

  const auto t_start = Clock::now();
  auto coarse = coarsen(graph, config.uc.initial(), config.k, rng);
  report.coarsen_s = seconds_since(t_start);
  const CoarseLevel& level0 = coarse.level;
  report.coarse_vertices = level0.graph->vertex_count();
  report.coarsen_stopped_early = coarse.stopped_early;
  if (coarse.stopped_early)
    report.warnings.push_back("coarsening stopped early at " + std::to_string(report.coarse_vertices) +
                              " vertices (target " + std::to_string(coarse.target) + "): no mergeable edge left");
  if (static_cast<std::size_t>(config.k) > report.coarse_vertices)
    throw Error("run: k exceeds the number of vertices in the coarsened graph");

  const auto t_kmed = Clock::now();
  KMedoidsConfig kc{config.k, config.mi, config.dev_target, config.harvest_threshold, config.sampler, config.medoid_rule};
  std::function<void(const DistrictingPlan&)> on_plan;
  if (config.check_invariants) on_plan = [&](const DistrictingPlan& p) { check(*level0.graph, p); };
  KMedoidsResult km = run_kmedoids(*level0.graph, kc, rng, on_plan);
  report.kmedoids_s = seconds_since(t_kmed);
  report.kmedoids_iterations = km.iterations_run;

  report.final = refine(level0, km.best_plan, config, check);
  report.local_search_s = report.final.runtime_s;
  report.algorithm_s = seconds_since(t_start);

  const auto t_eval = Clock::now();
  report.final.metrics = evaluate(*graph, report.final.plan);
  {
    auto [full, lifted] = uncoarsen_to(level0, km.best_plan, 1.0);
    report.kmedoids_metrics = evaluate(*full.graph, lifted);
  }
  report.evaluate_s = seconds_since(t_eval);
  check(*graph, report.final.plan);

  const auto best_key = km.best_plan.canonical_assignment();
  const auto t_harvest = Clock::now();
  for (const auto& plan : km.harvested_plans) {
    if (plan.canonical_assignment() == best_key) continue;
    ++report.additional_plans;
    if (!config.refine_harvest) continue;
    RefinedPlan r = refine(level0, plan, config, check);
    r.metrics = evaluate(*graph, r.plan);
    check(*graph, r.plan);
    report.harvest.push_back(std::move(r));
  }
  report.harvest_s = seconds_since(t_harvest);
  return report;
}

std::uint64_t ensemble_seed(std::uint64_t master, std::size_t index) {
  return Rng::splitmix64(master ^ Rng::splitmix64(static_cast<std::uint64_t>(index) + 1));
}

std::vector<RunReport> run_ensemble(std::shared_ptr<const DualGraph> graph, const RunConfig& config, std::size_t runs,
                                    std::size_t jobs) {
  if (runs < 1) throw Error("ensemble: runs must be at least 1");
  config.validate();
  std::vector<std::optional<RunReport>> slots(runs);
  std::vector<std::exception_ptr> errors(runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < runs;) {
      try {
        RunConfig c = config;
        c.seed = ensemble_seed(config.seed, i);
        slots[i] = run_once(graph, c);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<RunReport> out;
  out.reserve(runs);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace {

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

EnsembleSummary summarize(const std::vector<RunReport>& reports, double ingest_s) {
  EnsembleSummary s;
  s.runs = reports.size();
  if (reports.empty()) return s;
  const double n = static_cast<double>(reports.size());
  std::vector<std::optional<double>> kmed_comp, ls_comp, add_dev, add_comp;
  double add_runtime = 0.0;
  s.ls_min_dev = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) {
    s.kmed_mean_dev += r.kmedoids_metrics.dev_percent / n;
    kmed_comp.push_back(r.kmedoids_metrics.mean_compactness);
    s.ls_mean_dev += r.final.metrics.dev_percent / n;
    s.ls_min_dev = std::min(s.ls_min_dev, r.final.metrics.dev_percent);
    ls_comp.push_back(r.final.metrics.mean_compactness);
    s.alg_runtime_s += r.algorithm_s / n;
    s.total_runtime_s += (r.algorithm_s + r.evaluate_s + ingest_s) / n;
    s.additional_mean += static_cast<double>(r.additional_plans) / n;
    s.harvest_total_runtime_s += (r.algorithm_s + r.evaluate_s + r.harvest_s + ingest_s) / n;
    for (const auto& h : r.harvest) {
      add_dev.emplace_back(h.metrics.dev_percent);
      add_comp.push_back(h.metrics.mean_compactness);
      add_runtime += h.runtime_s;
    }
  }
  s.kmed_mean_comp = mean_of(kmed_comp);
  s.ls_mean_comp = mean_of(ls_comp);
  s.additional_mean_dev = mean_of(add_dev);
  s.additional_mean_comp = mean_of(add_comp);
  if (!add_dev.empty()) s.additional_runtime_per_plan_s = add_runtime / static_cast<double>(add_dev.size());
  return s;
}

}  // namespace redistrict
