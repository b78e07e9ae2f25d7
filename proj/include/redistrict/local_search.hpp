#pragma once

#include <functional>
#include <map>
#include <string_view>
#include <tuple>
#include <vector>

#include "redistrict/graph.hpp"

namespace redistrict {

enum class Neighborhood { Flip, Swap, Cmb };

Neighborhood parse_neighborhood(std::string_view name);
std::string_view to_string(Neighborhood nf);

/// Stand-in for the zero-population dummy vertex of a Flip.
inline constexpr VertexIndex kNoVertex = -1;

/// v_out leaves the heavy district for the light one; v_in (if any) goes the
/// other way.
struct Move {
  VertexIndex v_out = kNoVertex;
  VertexIndex v_in = kNoVertex;
  DistrictIndex heavy = kUnassigned;
  DistrictIndex light = kUnassigned;

  bool is_flip() const { return v_in == kNoVertex; }
  friend bool operator==(const Move&, const Move&) = default;
};

/// Border vertices of `heavy` touching `light` that are not articulation
/// points of `heavy`; empty when `heavy` has a single vertex.
std::vector<Move> flip_candidates(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex heavy,
                                  DistrictIndex light);

/// Pairs (v_i in heavy, v_j in light), neither an articulation point, where
/// v_i touches light minus v_j and v_j touches heavy minus v_i, and both
/// districts stay connected after the exchange.
std::vector<Move> swap_candidates(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex heavy,
                                  DistrictIndex light);

/// max(|P'_heavy - Pop*|, |P'_light - Pop*|) / Pop* after the move.
double score_move(const DualGraph& graph, const DistrictingPlan& plan, const Move& move);
/// Same ordering as score_move in exact integers:
/// max(|k P'_heavy - T|, |k P'_light - T|).
Population score_key(const DualGraph& graph, const DistrictingPlan& plan, const Move& move);

/// Moves keyed by their unordered vertex set and district pair, so a move and
/// its inverse share a key.
class TabuList {
 public:
  explicit TabuList(int tenure) : tenure_(tenure) {}
  int tenure() const { return tenure_; }
  /// Move applied during iteration t stays tabu while iteration < t + 1 + tenure.
  void add(const Move& move, int iteration);
  bool is_tabu(const Move& move, int iteration) const;

 private:
  using Key = std::tuple<VertexIndex, VertexIndex, DistrictIndex, DistrictIndex>;
  static Key key(const Move& move);
  int tenure_;
  std::map<Key, int> expiry_;
};

struct LocalSearchConfig {
  int max_iterations = 750;
  Neighborhood neighborhood = Neighborhood::Cmb;
  double dev_target = 1.0;
};

struct LocalSearchStep {
  Move move;
  double score = 0.0;
  double dev = 0.0;
};

struct LocalSearchTrace {
  std::vector<LocalSearchStep> steps;
  DistrictingPlan plan;
  double initial_dev = 0.0;
  double final_dev = 0.0;
  int iterations = 0;
  /// True when the search stopped because no district pair offered a move.
  bool exhausted = false;
};

/// Tabu-guarded rebalancing: each iteration applies the best valid non-tabu
/// move for the first (most unbalanced) district pair that has one. Stops at
/// Dev < dev_target, after max_iterations moves, or when no pair has a move.
/// `on_move`, when set, sees the plan after every applied move.
LocalSearchTrace local_search(const DualGraph& graph, DistrictingPlan plan, const LocalSearchConfig& config,
                              const std::function<void(const DistrictingPlan&)>& on_move = {});

}  // namespace redistrict
