#pragma once

// Brute-force references shared by the unit tests and the acceptance run.
// They work from plain edge lists and union-find, never from the library's
// articulation points or candidate generators.

#include <cstdlib>
#include <map>
#include <optional>
#include <tuple>

#include "redistrict/kmedoids.hpp"
#include "redistrict/local_search.hpp"
#include "test_util.hpp"

namespace testutil {

using redistrict::kNoVertex;
using redistrict::kUnassigned;
using redistrict::Move;
using redistrict::Neighborhood;

// Remove-and-count oracle.
inline std::vector<VertexIndex> brute_cut_vertices(int n, const std::vector<Edge>& edges) {
  std::vector<char> keep(static_cast<std::size_t>(n), 1);
  const int base = components(n, edges, keep);
  std::vector<VertexIndex> out;
  for (int v = 0; v < n; ++v) {
    keep[static_cast<std::size_t>(v)] = 0;
    if (n > 1 && components(n, edges, keep) > base) out.push_back(v);
    keep[static_cast<std::size_t>(v)] = 1;
  }
  return out;
}

using Assignment = std::vector<DistrictIndex>;

inline bool set_connected_or_empty(const DualGraph& g, const Assignment& a, DistrictIndex d) {
  bool any = false;
  for (auto x : a) any |= x == d;
  return !any || connected_set(g, [&](int v) { return a[static_cast<std::size_t>(v)] == d; });
}

inline bool touches_except(const DualGraph& g, const Assignment& a, VertexIndex v, DistrictIndex d, VertexIndex except) {
  for (auto [x, y] : g.edges()) {
    const VertexIndex u = x == v ? y : (y == v ? x : kNoVertex);
    if (u != kNoVertex && u != except && a[static_cast<std::size_t>(u)] == d) return true;
  }
  return false;
}

// Every valid move for (heavy, light), straight from the definitions: edge
// scans and union-find instead of articulation points.
inline std::vector<Move> brute_moves(const DualGraph& g, const Assignment& a, DistrictIndex h, DistrictIndex l, Neighborhood nf) {
  const int n = static_cast<int>(a.size());
  auto removable = [&](VertexIndex v) {
    Assignment b = a;
    b[static_cast<std::size_t>(v)] = kUnassigned;
    return set_connected_or_empty(g, b, a[static_cast<std::size_t>(v)]);
  };
  std::size_t heavy_size = 0;
  for (auto x : a) heavy_size += x == h;
  std::vector<Move> out;
  if (nf != Neighborhood::Swap && heavy_size > 1)
    for (VertexIndex v = 0; v < n; ++v)
      if (a[static_cast<std::size_t>(v)] == h && touches_except(g, a, v, l, kNoVertex) && removable(v)) out.push_back({v, kNoVertex, h, l});
  if (nf != Neighborhood::Flip)
    for (VertexIndex vi = 0; vi < n; ++vi)
      for (VertexIndex vj = 0; vj < n; ++vj) {
        if (a[static_cast<std::size_t>(vi)] != h || a[static_cast<std::size_t>(vj)] != l) continue;
        if (!removable(vi) || !removable(vj)) continue;
        if (!touches_except(g, a, vi, l, vj) || !touches_except(g, a, vj, h, vi)) continue;
        Assignment b = a;
        b[static_cast<std::size_t>(vi)] = l;
        b[static_cast<std::size_t>(vj)] = h;
        if (set_connected_or_empty(g, b, h) && set_connected_or_empty(g, b, l)) out.push_back({vi, vj, h, l});
      }
  return out;
}

inline long long brute_key(const DualGraph& g, const Assignment& a, int k, const Move& m) {
  long long ph = 0, pl = 0, total = 0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    total += g.population(static_cast<VertexIndex>(v));
    if (a[v] == m.heavy) ph += g.population(static_cast<VertexIndex>(v));
    if (a[v] == m.light) pl += g.population(static_cast<VertexIndex>(v));
  }
  const long long out = g.population(m.v_out), in = m.is_flip() ? 0 : g.population(m.v_in);
  return std::max(std::llabs(k * (ph - out + in) - total), std::llabs(k * (pl + out - in) - total));
}

// Adjacent district pairs, heavier first, by descending disparity.
inline std::vector<std::pair<DistrictIndex, DistrictIndex>> brute_pairs(const DualGraph& g, const Assignment& a, int k) {
  std::vector<long long> pop(static_cast<std::size_t>(k), 0);
  for (std::size_t v = 0; v < a.size(); ++v) pop[static_cast<std::size_t>(a[v])] += g.population(static_cast<VertexIndex>(v));
  std::set<std::pair<int, int>> adj;
  for (auto [x, y] : g.edges()) {
    const int dx = a[static_cast<std::size_t>(x)], dy = a[static_cast<std::size_t>(y)];
    if (dx != dy) adj.emplace(std::min(dx, dy), std::max(dx, dy));
  }
  std::vector<std::tuple<long long, int, int>> rows;
  for (auto [p, q] : adj) {
    const bool p_heavy = pop[static_cast<std::size_t>(p)] >= pop[static_cast<std::size_t>(q)];
    const int h = p_heavy ? p : q, l = p_heavy ? q : p;
    rows.emplace_back(-std::llabs(pop[static_cast<std::size_t>(p)] - pop[static_cast<std::size_t>(q)]), h, l);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::pair<DistrictIndex, DistrictIndex>> out;
  for (auto [d, h, l] : rows) out.emplace_back(h, l);
  return out;
}

using TabuKey = std::tuple<int, int, int, int>;
inline TabuKey tabu_key(const Move& m) {
  return {std::min(m.v_out, m.v_in), std::max(m.v_out, m.v_in), std::min(m.heavy, m.light), std::max(m.heavy, m.light)};
}


// The move the search should take at iteration `it`: the first pair (in
// disparity order) with a valid non-tabu move, and its lowest
// (score, swap-ness, v_out, v_in).
inline std::optional<Move> brute_next_move(const DualGraph& g, const Assignment& a, int k, Neighborhood nf,
                                           const std::map<TabuKey, int>& expiry, int it) {
  for (auto [h, l] : brute_pairs(g, a, k)) {
    auto moves = brute_moves(g, a, h, l, nf);
    std::erase_if(moves, [&](const Move& m) {
      auto e = expiry.find(tabu_key(m));
      return e != expiry.end() && it < e->second;
    });
    if (moves.empty()) continue;
    return *std::min_element(moves.begin(), moves.end(), [&](const Move& x, const Move& y) {
      return std::tuple(brute_key(g, a, k, x), !x.is_flip(), x.v_out, x.v_in) <
             std::tuple(brute_key(g, a, k, y), !y.is_flip(), y.v_out, y.v_in);
    });
  }
  return std::nullopt;
}

inline DistrictingPlan grown_plan(const DualGraph& g, int k, std::mt19937_64& gen) {
  std::vector<VertexIndex> pool(g.vertex_count());
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), gen);
  const std::vector<VertexIndex> medoids(pool.begin(), pool.begin() + k);
  return redistrict::grow_districts(g, medoids);
}

}  // namespace testutil
