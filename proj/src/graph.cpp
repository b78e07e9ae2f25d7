#include "redistrict/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace redistrict {

namespace {

double ring_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

}  // namespace

DualGraph::DualGraph(std::vector<TabulationBlock> blocks,
                     std::vector<std::pair<VertexIndex, VertexIndex>> edges)
    : blocks_(std::move(blocks)) {
  const auto n = blocks_.size();
  if (n == 0) throw Error("graph has no vertices");
  if (n > static_cast<std::size_t>(std::numeric_limits<VertexIndex>::max()))
    throw Error("graph too large");

  std::unordered_set<std::string> ids;
  for (const auto& b : blocks_) {
    if (!ids.insert(b.id).second) throw Error("duplicate vertex id '" + b.id + "'");
    if (b.population < 0) throw Error("vertex '" + b.id + "' has negative population");
    for (const auto& ring : b.polygons) {
      if (ring.size() < 3) throw Error("vertex '" + b.id + "' has a ring with fewer than 3 points");
      if (!(ring_area(ring) > 0.0)) throw Error("vertex '" + b.id + "' has a zero-area ring");
    }
    total_population_ += b.population;
  }

  adjacency_.resize(n);
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
      throw Error("edge endpoint out of range");
    if (a == b) throw Error("self loop on vertex '" + blocks_[static_cast<std::size_t>(a)].id + "'");
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    auto dup = *std::adjacent_find(edges_.begin(), edges_.end());
    throw Error("duplicate edge {" + blocks_[static_cast<std::size_t>(dup.first)].id + ", " +
                blocks_[static_cast<std::size_t>(dup.second)].id + "}");
  }
  for (auto [a, b] : edges_) {
    adjacency_[static_cast<std::size_t>(a)].push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());

  std::vector<char> seen(n, 0);
  std::vector<VertexIndex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    VertexIndex u = stack.back();
    stack.pop_back();
    for (VertexIndex w : adjacency_[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != n)
    throw DisconnectedGraphError("graph is disconnected: " + std::to_string(n - reached) +
                                 " of " + std::to_string(n) + " vertices unreachable from '" +
                                 blocks_[0].id + "'");
}

bool DualGraph::adjacent(VertexIndex a, VertexIndex b) const {
  auto list = neighbors(a);
  return std::binary_search(list.begin(), list.end(), b);
}

bool DualGraph::has_geometry() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const TabulationBlock& b) { return b.has_geometry(); });
}

std::optional<VertexIndex> DualGraph::find(const std::string& id) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].id == id) return static_cast<VertexIndex>(i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------

DistrictingPlan::DistrictingPlan(const DualGraph& graph, int k)
    : k_(k), assignment_(graph.vertex_count(), kUnassigned), pops_(static_cast<std::size_t>(std::max(k, 0)), 0) {
  if (k < 1) throw Error("k must be at least 1");
}

DistrictingPlan::DistrictingPlan(const DualGraph& graph, int k, std::vector<DistrictIndex> assignment)
    : DistrictingPlan(graph, k) {
  if (assignment.size() != graph.vertex_count())
    throw Error("assignment has " + std::to_string(assignment.size()) + " entries, graph has " +
                std::to_string(graph.vertex_count()) + " vertices");
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    DistrictIndex d = assignment[v];
    if (d == kUnassigned) continue;
    if (d < 0 || d >= k) throw Error("district index " + std::to_string(d) + " out of range for k=" + std::to_string(k));
    pops_[static_cast<std::size_t>(d)] += graph.population(static_cast<VertexIndex>(v));
  }
  assignment_ = std::move(assignment);
}

void DistrictingPlan::assign(const DualGraph& graph, VertexIndex v, DistrictIndex d) {
  if (d != kUnassigned && (d < 0 || d >= k_)) throw Error("district index out of range");
  auto& slot = assignment_[static_cast<std::size_t>(v)];
  if (slot == d) return;
  const Population p = graph.population(v);
  if (slot != kUnassigned) pops_[static_cast<std::size_t>(slot)] -= p;
  if (d != kUnassigned) pops_[static_cast<std::size_t>(d)] += p;
  slot = d;
}

bool DistrictingPlan::complete() const {
  return std::none_of(assignment_.begin(), assignment_.end(),
                      [](DistrictIndex d) { return d == kUnassigned; });
}

std::vector<VertexIndex> DistrictingPlan::members(DistrictIndex d) const {
  std::vector<VertexIndex> out;
  for (std::size_t v = 0; v < assignment_.size(); ++v)
    if (assignment_[v] == d) out.push_back(static_cast<VertexIndex>(v));
  return out;
}

std::size_t DistrictingPlan::district_size(DistrictIndex d) const {
  return static_cast<std::size_t>(std::count(assignment_.begin(), assignment_.end(), d));
}

std::vector<DistrictIndex> DistrictingPlan::canonical_assignment() const {
  std::vector<DistrictIndex> relabel(static_cast<std::size_t>(k_), kUnassigned);
  DistrictIndex next = 0;
  std::vector<DistrictIndex> out(assignment_.size(), kUnassigned);
  for (std::size_t v = 0; v < assignment_.size(); ++v) {
    DistrictIndex d = assignment_[v];
    if (d == kUnassigned) continue;
    auto& r = relabel[static_cast<std::size_t>(d)];
    if (r == kUnassigned) r = next++;
    out[v] = r;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t Subgraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency) twice += list.size();
  return twice / 2;
}

std::vector<std::pair<VertexIndex, VertexIndex>> Subgraph::edges() const {
  std::vector<std::pair<VertexIndex, VertexIndex>> out;
  for (std::size_t i = 0; i < adjacency.size(); ++i)
    for (int j : adjacency[i])
      if (static_cast<std::size_t>(j) > i) {
        auto a = vertices[i], b = vertices[static_cast<std::size_t>(j)];
        out.emplace_back(std::min(a, b), std::max(a, b));
      }
  std::sort(out.begin(), out.end());
  return out;
}

Subgraph induced_subgraph(const DualGraph& graph, std::span<const VertexIndex> vertices) {
  Subgraph sub;
  sub.vertices.assign(vertices.begin(), vertices.end());
  sub.adjacency.resize(sub.vertices.size());
  std::unordered_map<VertexIndex, int> local;
  local.reserve(sub.vertices.size() * 2);
  for (std::size_t i = 0; i < sub.vertices.size(); ++i) local.emplace(sub.vertices[i], static_cast<int>(i));
  for (std::size_t i = 0; i < sub.vertices.size(); ++i) {
    for (VertexIndex w : graph.neighbors(sub.vertices[i])) {
      auto it = local.find(w);
      if (it != local.end()) sub.adjacency[i].push_back(it->second);
    }
    std::sort(sub.adjacency[i].begin(), sub.adjacency[i].end());
  }
  return sub;
}

Subgraph induced_district_subgraph(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex d) {
  if (d < 0 || d >= plan.k()) throw Error("district index " + std::to_string(d) + " out of range");
  auto members = plan.members(d);
  return induced_subgraph(graph, members);
}

bool is_connected(const Subgraph& sub) {
  if (sub.size() == 0) return false;
  std::vector<char> seen(sub.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int w : sub.adjacency[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  return reached == sub.size();
}

bool is_contiguous(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex d) {
  auto sub = induced_district_subgraph(graph, plan, d);
  if (sub.size() == 0) throw EmptyDistrictError("district " + std::to_string(d) + " is empty");
  return is_connected(sub);
}

bool all_districts_contiguous(const DualGraph& graph, const DistrictingPlan& plan) {
  for (DistrictIndex d = 0; d < plan.k(); ++d) {
    auto sub = induced_district_subgraph(graph, plan, d);
    if (!is_connected(sub)) return false;
  }
  return true;
}

std::vector<VertexIndex> articulation_points(const Subgraph& sub) {
  const std::size_t n = sub.size();
  if (n == 0) throw DisconnectedGraphError("articulation_points: empty subgraph");

  // Iterative Hopcroft-Tarjan low-link.
  std::vector<int> disc(n, -1), low(n, 0), parent(n, -1);
  std::vector<std::size_t> next_edge(n, 0);
  std::vector<char> is_cut(n, 0);
  int timer = 0;
  int root_children = 0;
  std::vector<int> stack{0};
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    int u = stack.back();
    auto& it = next_edge[static_cast<std::size_t>(u)];
    const auto& adj = sub.adjacency[static_cast<std::size_t>(u)];
    if (it < adj.size()) {
      int w = adj[it++];
      if (disc[static_cast<std::size_t>(w)] == -1) {
        parent[static_cast<std::size_t>(w)] = u;
        disc[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = timer++;
        if (u == 0) ++root_children;
        stack.push_back(w);
      } else if (w != parent[static_cast<std::size_t>(u)]) {
        low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], disc[static_cast<std::size_t>(w)]);
      }
    } else {
      stack.pop_back();
      int p = parent[static_cast<std::size_t>(u)];
      if (p >= 0) {
        low[static_cast<std::size_t>(p)] = std::min(low[static_cast<std::size_t>(p)], low[static_cast<std::size_t>(u)]);
        if (p != 0 && low[static_cast<std::size_t>(u)] >= disc[static_cast<std::size_t>(p)]) is_cut[static_cast<std::size_t>(p)] = 1;
      }
    }
  }
  if (timer != static_cast<int>(n)) throw DisconnectedGraphError("articulation_points: subgraph is disconnected");
  if (root_children > 1) is_cut[0] = 1;

  std::vector<VertexIndex> out;
  for (std::size_t i = 0; i < n; ++i)
    if (is_cut[i]) out.push_back(sub.vertices[i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BorderPair> border_pairs(const DualGraph& graph, const DistrictingPlan& plan) {
  std::map<std::pair<DistrictIndex, DistrictIndex>, bool> touching;
  for (auto [a, b] : graph.edges()) {
    DistrictIndex da = plan.district(a), db = plan.district(b);
    if (da == db || da == kUnassigned || db == kUnassigned) continue;
    touching[{std::min(da, db), std::max(da, db)}] = true;
  }
  std::vector<BorderPair> out;
  out.reserve(touching.size());
  for (const auto& [key, _] : touching) {
    auto [lo, hi] = key;
    Population plo = plan.district_population(lo), phi = plan.district_population(hi);
    if (phi > plo)
      out.push_back({hi, lo, phi - plo});
    else
      out.push_back({lo, hi, plo - phi});
  }
  std::sort(out.begin(), out.end(), [](const BorderPair& a, const BorderPair& b) {
    if (a.disparity != b.disparity) return a.disparity > b.disparity;
    if (a.heavy != b.heavy) return a.heavy < b.heavy;
    return a.light < b.light;
  });
  return out;
}

}  // namespace redistrict
