#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "redistrict/graph.hpp"
#include "redistrict/rng.hpp"

namespace redistrict {

/// k distinct vertex indices; medoid i seeds district i.
using MedoidSet = std::vector<VertexIndex>;

/// Edges of a spanning tree in subgraph-local indices, each as (lo, hi).
using TreeEdges = std::vector<std::pair<int, int>>;

enum class TreeSampler { Broder, Wilson };
enum class MedoidRule {
  /// Branch weights: edges in the subtree behind each neighbour (tree centroid).
  Branch,
  /// Each root-to-leaf path from the medoid is weighed by its length.
  Path,
};

TreeSampler parse_tree_sampler(std::string_view name);
MedoidRule parse_medoid_rule(std::string_view name);
std::string_view to_string(TreeSampler s);
std::string_view to_string(MedoidRule r);

/// Smallest-district-first growth from the medoids. Each step expands the
/// lightest district that can still grow by one frontier (its unassigned
/// neighbours, ascending), skipping vertices that would push it above
/// total/k. When nothing fits anywhere, the remaining vertices are swept in
/// ascending order onto their lightest adjacent district until none remain.
DistrictingPlan grow_districts(const DualGraph& graph, std::span<const VertexIndex> medoids);

/// Uniform spanning tree by random walk: the first-entrance edge of every
/// vertex. Throws DisconnectedGraphError on disconnected or empty input.
TreeEdges broder_spanning_tree(const Subgraph& sub, Rng& rng);
/// Same distribution via loop-erased random walks; faster on poorly
/// conducting districts.
TreeEdges wilson_spanning_tree(const Subgraph& sub, Rng& rng);
TreeEdges spanning_tree(const Subgraph& sub, TreeSampler sampler, Rng& rng);

/// Moves the medoid along the tree while one direction outweighs all others
/// combined. When two neighbours each outweigh the rest toward the other (a
/// tree with two centroids) the lower index wins. Throws Error when m is out of range
/// or the edges do not form a spanning tree on `vertex_count` vertices.
int recenter_medoid(std::size_t vertex_count, std::span<const std::pair<int, int>> tree, int m,
                    MedoidRule rule = MedoidRule::Branch);

struct KMedoidsConfig {
  int k = 0;
  int max_iterations = 100;
  double dev_target = 1.0;
  double harvest_threshold = 5.0;
  TreeSampler sampler = TreeSampler::Broder;
  MedoidRule medoid_rule = MedoidRule::Branch;
};

struct KMedoidsResult {
  DistrictingPlan best_plan;
  double best_dev = 0.0;
  int iterations_run = 0;
  /// Distinct plans (up to district relabelling) below the harvest threshold,
  /// in the order they were found. May include the best plan.
  std::vector<DistrictingPlan> harvested_plans;
  /// Deviation of the plan grown in each iteration.
  std::vector<double> dev_history;
};

/// Draws k medoids uniformly without replacement and alternates growth and
/// recentring until Dev < dev_target or max_iterations plans were grown.
/// `on_plan`, when set, sees every grown plan. Throws Error when k exceeds the
/// vertex count.
KMedoidsResult run_kmedoids(const DualGraph& graph, const KMedoidsConfig& config, Rng& rng,
                            const std::function<void(const DistrictingPlan&)>& on_plan = {});

}  // namespace redistrict
