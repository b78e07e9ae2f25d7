#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redistrict/graph.hpp"
#include "redistrict/metrics.hpp"
#include "redistrict/pipeline.hpp"

namespace redistrict {

/// {"graph_hash", "k", "assignment": {id: district}, "metrics", "config", "seed"}.
/// Keys are sorted and no timings are written, so equal runs give equal bytes.
std::string plan_json(const DualGraph& graph, const std::string& graph_hash, const DistrictingPlan& plan,
                      const PlanMetrics& metrics, const RunConfig& config, std::uint64_t seed);
void write_plan(const std::filesystem::path& path, const std::string& json_text);

struct PlanFile {
  DistrictingPlan plan;
  std::string graph_hash;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;
};

/// Throws ParseError with a line number on malformed or inconsistent input.
/// A graph hash that differs from `graph`'s is a warning, or an error when
/// `strict` is set.
PlanFile read_plan(const std::filesystem::path& path, const DualGraph& graph, bool strict = false);
PlanFile parse_plan(const std::string& text, const std::string& source, const DualGraph& graph, bool strict = false);

std::string metrics_json(const PlanMetrics& metrics, int indent = -1);

/// Ensemble summary: state,li,uc,nf,kmed_mean_dev,kmed_mean_comp,ls_mean_dev,
/// ls_min_dev,ls_mean_comp,alg_runtime_s,total_runtime_s
std::string summary_csv_header();
std::string summary_csv_row(const std::string& state, const RunConfig& config, const EnsembleSummary& s);
/// Harvest summary: state,li,uc,nf,additional_mean,additional_mean_dev,
/// additional_mean_comp,runtime_per_plan_s,total_runtime_s
std::string harvest_csv_header();
std::string harvest_csv_row(const std::string& state, const RunConfig& config, const EnsembleSummary& s);

}  // namespace redistrict
