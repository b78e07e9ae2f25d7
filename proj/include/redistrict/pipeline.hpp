#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "redistrict/coarsen.hpp"
#include "redistrict/graph.hpp"
#include "redistrict/kmedoids.hpp"
#include "redistrict/local_search.hpp"
#include "redistrict/metrics.hpp"

namespace redistrict {

struct RunConfig {
  int k = 0;
  int mi = 100;
  int li = 750;
  Neighborhood nf = Neighborhood::Cmb;
  UncoarseningSchedule uc{std::vector<double>{1.0}};
  std::uint64_t seed = 0;
  double dev_target = 1.0;
  double harvest_threshold = 5.0;
  /// Carry harvested k-medoids plans through uncoarsening and local search.
  bool refine_harvest = true;
  TreeSampler sampler = TreeSampler::Broder;
  MedoidRule medoid_rule = MedoidRule::Branch;
  /// Check completeness, contiguity and population bookkeeping of every
  /// intermediate plan and count violations in the report.
  bool check_invariants = false;

  /// Throws Error on out-of-range values.
  void validate() const;
};

struct RefinedPlan {
  DistrictingPlan plan;
  PlanMetrics metrics;
  /// Local search iterations per stage (one stage per schedule entry).
  std::vector<int> ls_iterations;
  double runtime_s = 0.0;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::size_t coarse_vertices = 0;
  bool coarsen_stopped_early = false;
  int kmedoids_iterations = 0;
  /// Best k-medoids plan lifted to the full graph, before any local search.
  PlanMetrics kmedoids_metrics;
  RefinedPlan final;
  /// Harvested plans other than the best one.
  std::size_t additional_plans = 0;
  /// Refined additional plans; empty when refine_harvest is off.
  std::vector<RefinedPlan> harvest;

  double coarsen_s = 0.0;
  double kmedoids_s = 0.0;
  double local_search_s = 0.0;
  /// coarsen + k-medoids + uncoarsening and local search of the best plan.
  double algorithm_s = 0.0;
  /// Final metric evaluation.
  double evaluate_s = 0.0;
  double harvest_s = 0.0;

  std::size_t invariant_checks = 0;
  std::size_t invariant_violations = 0;
  std::vector<std::string> warnings;
};

/// Counts the ways `plan` fails to be a complete, contiguous,
/// population-consistent plan on `graph` (0 when it is fine).
std::size_t plan_violations(const DualGraph& graph, const DistrictingPlan& plan);

/// Coarsen, k-medoids, then local search at every schedule step on the way
/// back to the full graph. Uses config.seed directly.
RunReport run_once(std::shared_ptr<const DualGraph> graph, const RunConfig& config);

/// Seed of run i in an ensemble with the given master seed.
std::uint64_t ensemble_seed(std::uint64_t master, std::size_t index);

/// run_once for i = 0..runs-1 with ensemble_seed(config.seed, i), on up to
/// `jobs` threads. Results are in run order and do not depend on `jobs`.
std::vector<RunReport> run_ensemble(std::shared_ptr<const DualGraph> graph, const RunConfig& config, std::size_t runs,
                                    std::size_t jobs);

struct EnsembleSummary {
  std::size_t runs = 0;
  double kmed_mean_dev = 0.0;
  std::optional<double> kmed_mean_comp;
  double ls_mean_dev = 0.0;
  double ls_min_dev = 0.0;
  std::optional<double> ls_mean_comp;
  double alg_runtime_s = 0.0;
  double total_runtime_s = 0.0;

  double additional_mean = 0.0;
  /// Over refined additional plans; absent when none were refined.
  std::optional<double> additional_mean_dev;
  std::optional<double> additional_mean_comp;
  std::optional<double> additional_runtime_per_plan_s;
  double harvest_total_runtime_s = 0.0;
};

/// `ingest_s` is the one-off load time, charged to every run's total as if
/// each run had read its own input.
EnsembleSummary summarize(const std::vector<RunReport>& reports, double ingest_s = 0.0);

}  // namespace redistrict
