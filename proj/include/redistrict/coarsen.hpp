#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "redistrict/graph.hpp"
#include "redistrict/rng.hpp"

namespace redistrict {

/// Ascending fractions uc_0 < ... < uc_q = 1, each in (0, 1].
class UncoarseningSchedule {
 public:
  /// Throws Error when the list is empty, not strictly increasing, outside
  /// (0, 1] or not ending at exactly 1.
  explicit UncoarseningSchedule(std::vector<double> fractions);
  /// "0.3,0.5,0.7,0.9,0.95,1"
  static UncoarseningSchedule parse(std::string_view text);

  const std::vector<double>& fractions() const { return fractions_; }
  double initial() const { return fractions_.front(); }
  std::size_t steps() const { return fractions_.size() - 1; }
  std::string to_string() const;

 private:
  std::vector<double> fractions_;
};

/// floor(fraction * n), guarded against 0.7 * 10 landing on 6.999...
std::size_t target_vertex_count(double fraction, std::size_t n);

/// Vertices are tracked by handle: 0..N-1 are the original vertices and a
/// child created by merge number s gets handle N + s.
struct MergeRecord {
  struct Parent {
    VertexIndex handle;
    std::string id;
    Population population;
    /// Neighbour handles at the moment of the merge (excluding the other
    /// parent), sorted.
    std::vector<VertexIndex> neighbors;
  };
  std::size_t sequence;
  VertexIndex child;
  Parent a;
  Parent b;
};

/// Immutable record of one coarsening pass. Levels refer to it by the number
/// of records still applied, so any number of plans can be lifted
/// independently.
struct CoarseningHistory {
  std::shared_ptr<const DualGraph> original;
  std::vector<MergeRecord> records;

  std::size_t original_size() const { return original->vertex_count(); }
  std::string child_id(std::size_t sequence) const;
};

/// The graph obtained by applying the first `applied` merges. Vertex i of
/// `graph` has handle handles[i]; handles ascend, so a fully lifted level
/// uses exactly the original vertex order.
struct CoarseLevel {
  std::shared_ptr<const CoarseningHistory> history;
  std::size_t applied = 0;
  std::shared_ptr<const DualGraph> graph;
  std::vector<VertexIndex> handles;
};

struct CoarsenResult {
  CoarseLevel level;
  std::size_t target = 0;
  /// True when no mergeable edge was left before reaching the target.
  bool stopped_early = false;
};

/// Random edge contraction: an edge is drawn uniformly from the current edge
/// set and contracted when the two populations sum to less than total/k,
/// until floor(fraction * N) vertices remain or no edge qualifies.
CoarsenResult coarsen(std::shared_ptr<const DualGraph> graph, double fraction, int k, Rng& rng);

/// Undoes merges (most recent first) until floor(fraction * N) vertices
/// exist. Parents inherit the child's district. Throws Error if the target
/// is below the current size or the plan does not fit the level.
std::pair<CoarseLevel, DistrictingPlan> uncoarsen_to(const CoarseLevel& level,
                                                     const DistrictingPlan& plan,
                                                     double fraction);

}  // namespace redistrict
