#include "redistrict/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace redistrict {

UncoarseningSchedule::UncoarseningSchedule(std::vector<double> fractions) : fractions_(std::move(fractions)) {
  if (fractions_.empty()) throw Error("uncoarsening schedule is empty");
  for (std::size_t i = 0; i < fractions_.size(); ++i) {
    const double f = fractions_[i];
    if (!(f > 0.0 && f <= 1.0)) throw Error("uncoarsening schedule: fraction outside (0, 1]");
    if (i > 0 && !(f > fractions_[i - 1])) throw Error("uncoarsening schedule must be strictly increasing");
  }
  if (fractions_.back() != 1.0) throw Error("uncoarsening schedule must end at 1");
}

UncoarseningSchedule UncoarseningSchedule::parse(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error("uncoarsening schedule: '" + item + "' is not a number");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw Error("uncoarsening schedule: '" + item + "' is not a number");
    out.push_back(v);
  }
  return UncoarseningSchedule(std::move(out));
}

std::string UncoarseningSchedule::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < fractions_.size(); ++i) out << (i ? "," : "") << fractions_[i];
  return out.str();
}

std::size_t target_vertex_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

std::string CoarseningHistory::child_id(std::size_t sequence) const { return "~c" + std::to_string(sequence); }

namespace {

// Mutable adjacency keyed by handle, used while merging or splitting.
struct WorkingGraph {
  std::map<VertexIndex, std::vector<VertexIndex>> adj;  // sorted neighbour lists
  std::unordered_map<VertexIndex, Population> pop;

  static void insert_sorted(std::vector<VertexIndex>& v, VertexIndex x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  }
  static void erase_sorted(std::vector<VertexIndex>& v, VertexIndex x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
  }
};

WorkingGraph working_from(const CoarseLevel& level) {
  WorkingGraph w;
  const DualGraph& g = *level.graph;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    const auto v = static_cast<VertexIndex>(i);
    std::vector<VertexIndex> nb;
    for (VertexIndex u : g.neighbors(v)) nb.push_back(level.handles[static_cast<std::size_t>(u)]);
    std::sort(nb.begin(), nb.end());
    w.adj.emplace(level.handles[i], std::move(nb));
    w.pop.emplace(level.handles[i], g.population(v));
  }
  return w;
}

CoarseLevel make_level(std::shared_ptr<const CoarseningHistory> history, std::size_t applied, const WorkingGraph& w) {
  const auto n = static_cast<VertexIndex>(history->original_size());
  CoarseLevel level;
  level.applied = applied;
  std::unordered_map<VertexIndex, VertexIndex> index;
  std::vector<TabulationBlock> blocks;
  for (const auto& [h, _] : w.adj) {
    index.emplace(h, static_cast<VertexIndex>(level.handles.size()));
    level.handles.push_back(h);
    if (h < n) {
      blocks.push_back(history->original->block(h));
    } else {
      TabulationBlock b;
      b.id = history->child_id(static_cast<std::size_t>(h - n));
      b.population = w.pop.at(h);
      blocks.push_back(std::move(b));
    }
  }
  std::vector<std::pair<VertexIndex, VertexIndex>> edges;
  for (const auto& [h, nb] : w.adj)
    for (VertexIndex u : nb)
      if (h < u) edges.emplace_back(index.at(h), index.at(u));
  level.graph = std::make_shared<const DualGraph>(std::move(blocks), std::move(edges));
  level.history = std::move(history);
  return level;
}

std::uint64_t edge_key(VertexIndex a, VertexIndex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

CoarsenResult coarsen(std::shared_ptr<const DualGraph> graph, double fraction, int k, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("coarsen: fraction must be in (0, 1]");
  if (k < 1) throw Error("coarsen: k must be at least 1");
  const std::size_t n = graph->vertex_count();
  const Population total = graph->total_population();

  auto history = std::make_shared<CoarseningHistory>();
  history->original = graph;

  CoarsenResult result;
  result.target = std::max<std::size_t>(1, target_vertex_count(fraction, n));

  WorkingGraph w;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<VertexIndex>(i);
    w.adj.emplace(v, std::vector<VertexIndex>(graph->neighbors(v).begin(), graph->neighbors(v).end()));
    w.pop.emplace(v, graph->population(v));
  }

  // Current edges in a flat vector (uniform draws) with a position index
  // (O(1) removal by swapping with the back).
  std::vector<std::pair<VertexIndex, VertexIndex>> edges = graph->edges();
  std::unordered_map<std::uint64_t, std::size_t> position;
  for (std::size_t i = 0; i < edges.size(); ++i) position.emplace(edge_key(edges[i].first, edges[i].second), i);
  auto remove_edge = [&](VertexIndex a, VertexIndex b) {
    auto it = position.find(edge_key(a, b));
    const std::size_t i = it->second;
    position.erase(it);
    if (i + 1 != edges.size()) {
      edges[i] = edges.back();
      position[edge_key(edges[i].first, edges[i].second)] = i;
    }
    edges.pop_back();
  };
  auto eligible = [&](const std::pair<VertexIndex, VertexIndex>& e) {
    return (w.pop.at(e.first) + w.pop.at(e.second)) * k < total;
  };

  std::size_t misses = 0;
  VertexIndex next_handle = static_cast<VertexIndex>(n);
  while (w.adj.size() > result.target) {
    if (edges.empty()) {
      result.stopped_early = true;
      break;
    }
    const auto e = edges[rng.uniform_index(edges.size())];
    if (!eligible(e)) {
      // Merging only grows populations, so an ineligible edge never becomes
      // eligible; once a full edge count of misses piles up, check whether
      // anything is left to draw.
      if (++misses >= edges.size()) {
        if (std::none_of(edges.begin(), edges.end(), eligible)) {
          result.stopped_early = true;
          break;
        }
        misses = 0;
      }
      continue;
    }
    misses = 0;

    const auto [a, b] = e;
    MergeRecord rec;
    rec.sequence = history->records.size();
    rec.child = next_handle++;
    auto parent = [&](VertexIndex h, VertexIndex other) {
      MergeRecord::Parent p;
      p.handle = h;
      p.id = h < static_cast<VertexIndex>(n) ? graph->block(h).id : history->child_id(static_cast<std::size_t>(h) - n);
      p.population = w.pop.at(h);
      for (VertexIndex u : w.adj.at(h))
        if (u != other) p.neighbors.push_back(u);
      return p;
    };
    rec.a = parent(a, b);
    rec.b = parent(b, a);

    std::vector<VertexIndex> merged;
    std::set_union(rec.a.neighbors.begin(), rec.a.neighbors.end(), rec.b.neighbors.begin(), rec.b.neighbors.end(),
                   std::back_inserter(merged));
    remove_edge(a, b);
    for (VertexIndex u : rec.a.neighbors) {
      remove_edge(a, u);
      WorkingGraph::erase_sorted(w.adj.at(u), a);
    }
    for (VertexIndex u : rec.b.neighbors) {
      remove_edge(b, u);
      WorkingGraph::erase_sorted(w.adj.at(u), b);
    }
    for (VertexIndex u : merged) {
      WorkingGraph::insert_sorted(w.adj.at(u), rec.child);
      position.emplace(edge_key(u, rec.child), edges.size());
      edges.emplace_back(std::min(u, rec.child), std::max(u, rec.child));
    }
    w.adj.erase(a);
    w.adj.erase(b);
    w.adj.emplace(rec.child, std::move(merged));
    w.pop.emplace(rec.child, rec.a.population + rec.b.population);
    w.pop.erase(a);
    w.pop.erase(b);
    history->records.push_back(std::move(rec));
  }

  const std::size_t applied = history->records.size();
  result.level = make_level(std::move(history), applied, w);
  return result;
}

std::pair<CoarseLevel, DistrictingPlan> uncoarsen_to(const CoarseLevel& level,
                                                     const DistrictingPlan& plan,
                                                     double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("uncoarsen_to: fraction must be in (0, 1]");
  const DualGraph& g = *level.graph;
  if (plan.size() != g.vertex_count()) throw Error("uncoarsen_to: plan does not match the level's graph");
  if (!plan.complete()) throw Error("uncoarsen_to: plan is incomplete");
  const std::size_t target = target_vertex_count(fraction, level.history->original_size());
  if (target < g.vertex_count()) throw Error("uncoarsen_to: target is smaller than the current graph");

  WorkingGraph w = working_from(level);
  std::unordered_map<VertexIndex, DistrictIndex> district;
  for (std::size_t i = 0; i < g.vertex_count(); ++i)
    district.emplace(level.handles[i], plan.district(static_cast<VertexIndex>(i)));

  std::size_t applied = level.applied;
  while (w.adj.size() < target) {
    if (applied == 0) throw Error("uncoarsen_to: merge history exhausted before reaching the target");
    const MergeRecord& rec = level.history->records[--applied];
    for (VertexIndex u : w.adj.at(rec.child)) WorkingGraph::erase_sorted(w.adj.at(u), rec.child);
    w.adj.erase(rec.child);
    w.pop.erase(rec.child);
    const DistrictIndex d = district.at(rec.child);
    district.erase(rec.child);
    for (const auto* p : {&rec.a, &rec.b}) {
      const VertexIndex other = p == &rec.a ? rec.b.handle : rec.a.handle;
      std::vector<VertexIndex> nb = p->neighbors;
      WorkingGraph::insert_sorted(nb, other);
      for (VertexIndex u : p->neighbors) WorkingGraph::insert_sorted(w.adj.at(u), p->handle);
      w.adj.emplace(p->handle, std::move(nb));
      w.pop.emplace(p->handle, p->population);
      district.emplace(p->handle, d);
    }
  }

  CoarseLevel lifted = make_level(level.history, applied, w);
  std::vector<DistrictIndex> assignment;
  assignment.reserve(lifted.handles.size());
  for (VertexIndex h : lifted.handles) assignment.push_back(district.at(h));
  DistrictingPlan lifted_plan(*lifted.graph, plan.k(), std::move(assignment));
  return {std::move(lifted), std::move(lifted_plan)};
}

}  // namespace redistrict
