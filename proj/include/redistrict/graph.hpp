#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace redistrict {

using VertexIndex = std::int32_t;
using DistrictIndex = std::int32_t;
using Population = std::int64_t;

inline constexpr DistrictIndex kUnassigned = -1;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DisconnectedGraphError : public Error {
 public:
  using Error::Error;
};

class EmptyDistrictError : public Error {
 public:
  using Error::Error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Closed ring; the first vertex is not repeated at the end.
using Ring = std::vector<Point>;

struct TabulationBlock {
  std::string id;
  Population population = 0;
  /// One ring per polygon (outer boundaries only). Empty when the input
  /// carried no geometry.
  std::vector<Ring> polygons;
  std::optional<std::string> county;

  bool has_geometry() const { return !polygons.empty(); }
};

/// Undirected simple connected graph over tabulation blocks. Immutable once
/// constructed; adjacency lists are sorted ascending.
class DualGraph {
 public:
  /// Validates ids, populations, rings and edges; throws Error on self loops,
  /// duplicate edges or out-of-range endpoints and DisconnectedGraphError
  /// when the graph has more than one component.
  DualGraph(std::vector<TabulationBlock> blocks,
            std::vector<std::pair<VertexIndex, VertexIndex>> edges);

  std::size_t vertex_count() const { return blocks_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const TabulationBlock& block(VertexIndex v) const { return blocks_[static_cast<std::size_t>(v)]; }
  const std::vector<TabulationBlock>& blocks() const { return blocks_; }
  Population population(VertexIndex v) const { return blocks_[static_cast<std::size_t>(v)].population; }
  Population total_population() const { return total_population_; }

  std::span<const VertexIndex> neighbors(VertexIndex v) const {
    return adjacency_[static_cast<std::size_t>(v)];
  }
  bool adjacent(VertexIndex a, VertexIndex b) const;

  /// Edges as (lo, hi) pairs, sorted lexicographically.
  const std::vector<std::pair<VertexIndex, VertexIndex>>& edges() const { return edges_; }

  bool has_geometry() const;
  std::optional<VertexIndex> find(const std::string& id) const;

 private:
  std::vector<TabulationBlock> blocks_;
  std::vector<std::vector<VertexIndex>> adjacency_;
  std::vector<std::pair<VertexIndex, VertexIndex>> edges_;
  Population total_population_ = 0;
};

/// Assignment of vertices to k districts with cached district populations.
class DistrictingPlan {
 public:
  /// Placeholder with no vertices and k = 0.
  DistrictingPlan() : k_(0) {}
  /// All vertices unassigned.
  DistrictingPlan(const DualGraph& graph, int k);
  /// Throws Error on wrong length or out-of-range districts.
  DistrictingPlan(const DualGraph& graph, int k, std::vector<DistrictIndex> assignment);

  int k() const { return k_; }
  std::size_t size() const { return assignment_.size(); }
  DistrictIndex district(VertexIndex v) const { return assignment_[static_cast<std::size_t>(v)]; }
  const std::vector<DistrictIndex>& assignment() const { return assignment_; }
  Population district_population(DistrictIndex d) const { return pops_[static_cast<std::size_t>(d)]; }
  const std::vector<Population>& district_populations() const { return pops_; }

  /// Moves v into d (or kUnassigned), keeping the population cache coherent.
  void assign(const DualGraph& graph, VertexIndex v, DistrictIndex d);

  bool complete() const;
  std::vector<VertexIndex> members(DistrictIndex d) const;
  std::size_t district_size(DistrictIndex d) const;

  /// Districts renumbered in order of their lowest member vertex, so that two
  /// plans describing the same partition compare equal.
  std::vector<DistrictIndex> canonical_assignment() const;

  friend bool operator==(const DistrictingPlan& a, const DistrictingPlan& b) {
    return a.k_ == b.k_ && a.assignment_ == b.assignment_;
  }

 private:
  int k_;
  std::vector<DistrictIndex> assignment_;
  std::vector<Population> pops_;
};

/// A vertex subset of a DualGraph with local adjacency. `vertices[i]` is the
/// global index of local vertex i; local adjacency lists are sorted.
struct Subgraph {
  std::vector<VertexIndex> vertices;
  std::vector<std::vector<int>> adjacency;

  std::size_t size() const { return vertices.size(); }
  std::size_t edge_count() const;
  std::vector<std::pair<VertexIndex, VertexIndex>> edges() const;
};

/// Subgraph induced by an arbitrary vertex set (order preserved).
Subgraph induced_subgraph(const DualGraph& graph, std::span<const VertexIndex> vertices);
/// Vertices assigned to d (ascending) and the edges among them.
Subgraph induced_district_subgraph(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex d);

bool is_connected(const Subgraph& sub);
/// Throws EmptyDistrictError when d has no vertices.
bool is_contiguous(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex d);
bool all_districts_contiguous(const DualGraph& graph, const DistrictingPlan& plan);

/// Cut vertices of a connected subgraph as sorted global indices.
/// Throws DisconnectedGraphError on disconnected or empty input.
std::vector<VertexIndex> articulation_points(const Subgraph& sub);

struct BorderPair {
  DistrictIndex heavy;
  DistrictIndex light;
  Population disparity;
  friend bool operator==(const BorderPair&, const BorderPair&) = default;
};

/// Every pair of districts joined by at least one cut edge, heavier district
/// first (lower index first on equal populations), sorted by disparity
/// descending then (heavy, light) ascending.
std::vector<BorderPair> border_pairs(const DualGraph& graph, const DistrictingPlan& plan);

}  // namespace redistrict
