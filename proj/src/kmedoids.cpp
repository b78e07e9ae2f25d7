#include "redistrict/kmedoids.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "redistrict/metrics.hpp"

namespace redistrict {

TreeSampler parse_tree_sampler(std::string_view name) {
  if (name == "broder") return TreeSampler::Broder;
  if (name == "wilson") return TreeSampler::Wilson;
  throw Error("unknown tree sampler '" + std::string(name) + "' (expected broder or wilson)");
}

MedoidRule parse_medoid_rule(std::string_view name) {
  if (name == "branch") return MedoidRule::Branch;
  if (name == "path") return MedoidRule::Path;
  throw Error("unknown medoid rule '" + std::string(name) + "' (expected branch or path)");
}

std::string_view to_string(TreeSampler s) { return s == TreeSampler::Broder ? "broder" : "wilson"; }
std::string_view to_string(MedoidRule r) { return r == MedoidRule::Branch ? "branch" : "path"; }

DistrictingPlan grow_districts(const DualGraph& graph, std::span<const VertexIndex> medoids) {
  const int k = static_cast<int>(medoids.size());
  if (k < 1) throw Error("grow_districts: no medoids");
  DistrictingPlan plan(graph, k);
  const auto n = static_cast<VertexIndex>(graph.vertex_count());
  const Population total = graph.total_population();

  // Unassigned vertices known to touch each district. Entries go stale once
  // assigned elsewhere and are skipped on read.
  std::vector<std::set<VertexIndex>> touching(static_cast<std::size_t>(k));
  std::size_t unassigned = graph.vertex_count();
  auto place = [&](VertexIndex v, DistrictIndex d) {
    plan.assign(graph, v, d);
    --unassigned;
    for (VertexIndex u : graph.neighbors(v))
      if (plan.district(u) == kUnassigned) touching[static_cast<std::size_t>(d)].insert(u);
  };
  for (DistrictIndex d = 0; d < k; ++d) {
    const VertexIndex m = medoids[static_cast<std::size_t>(d)];
    if (m < 0 || m >= n) throw Error("grow_districts: medoid out of range");
    if (plan.district(m) != kUnassigned) throw Error("grow_districts: duplicate medoid");
    plan.assign(graph, m, d);
    --unassigned;
  }
  for (DistrictIndex d = 0; d < k; ++d)
    for (VertexIndex u : graph.neighbors(medoids[static_cast<std::size_t>(d)]))
      if (plan.district(u) == kUnassigned) touching[static_cast<std::size_t>(d)].insert(u);

  std::vector<DistrictIndex> order(static_cast<std::size_t>(k));
  while (unassigned > 0) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](DistrictIndex a, DistrictIndex b) {
      return plan.district_population(a) < plan.district_population(b);
    });
    bool grew = false;
    for (DistrictIndex d : order) {
      auto& cand = touching[static_cast<std::size_t>(d)];
      std::vector<VertexIndex> frontier;
      for (auto it = cand.begin(); it != cand.end();) {
        if (plan.district(*it) != kUnassigned) {
          it = cand.erase(it);
        } else {
          frontier.push_back(*it++);
        }
      }
      for (VertexIndex v : frontier) {
        if ((plan.district_population(d) + graph.population(v)) * k > total) continue;
        cand.erase(v);
        place(v, d);
        grew = true;
      }
      if (grew) break;
    }
    if (grew) continue;

    // Nothing fits under the cap anywhere: sweep the rest onto the lightest
    // adjacent district.
    while (unassigned > 0) {
      bool progress = false;
      for (VertexIndex v = 0; v < n; ++v) {
        if (plan.district(v) != kUnassigned) continue;
        DistrictIndex best = kUnassigned;
        for (VertexIndex u : graph.neighbors(v)) {
          const DistrictIndex d = plan.district(u);
          if (d == kUnassigned) continue;
          if (best == kUnassigned || plan.district_population(d) < plan.district_population(best) ||
              (plan.district_population(d) == plan.district_population(best) && d < best))
            best = d;
        }
        if (best == kUnassigned) continue;
        plan.assign(graph, v, best);
        --unassigned;
        progress = true;
      }
      if (!progress) throw DisconnectedGraphError("grow_districts: vertices unreachable from every medoid");
    }
  }
  return plan;
}

namespace {

void require_connected(const Subgraph& sub, const char* who) {
  if (sub.size() == 0) throw DisconnectedGraphError(std::string(who) + ": empty subgraph");
  if (!is_connected(sub)) throw DisconnectedGraphError(std::string(who) + ": subgraph is disconnected");
}

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

}  // namespace

TreeEdges broder_spanning_tree(const Subgraph& sub, Rng& rng) {
  require_connected(sub, "broder_spanning_tree");
  const std::size_t n = sub.size();
  TreeEdges tree;
  tree.reserve(n - 1);
  std::vector<char> seen(n, 0);
  int cur = static_cast<int>(rng.uniform_index(n));
  seen[static_cast<std::size_t>(cur)] = 1;
  std::size_t visited = 1;
  while (visited < n) {
    const auto& nb = sub.adjacency[static_cast<std::size_t>(cur)];
    const int next = nb[rng.uniform_index(nb.size())];
    if (!seen[static_cast<std::size_t>(next)]) {
      seen[static_cast<std::size_t>(next)] = 1;
      ++visited;
      tree.push_back(ordered(cur, next));
    }
    cur = next;
  }
  return tree;
}

TreeEdges wilson_spanning_tree(const Subgraph& sub, Rng& rng) {
  require_connected(sub, "wilson_spanning_tree");
  const std::size_t n = sub.size();
  TreeEdges tree;
  tree.reserve(n - 1);
  std::vector<char> in_tree(n, 0);
  std::vector<int> next(n, -1);
  in_tree[rng.uniform_index(n)] = 1;
  for (std::size_t start = 0; start < n; ++start) {
    // Walk until the tree is hit; overwriting next[] erases loops.
    std::size_t u = start;
    while (!in_tree[u]) {
      const auto& nb = sub.adjacency[u];
      next[u] = nb[rng.uniform_index(nb.size())];
      u = static_cast<std::size_t>(next[u]);
    }
    for (u = start; !in_tree[u]; u = static_cast<std::size_t>(next[u])) {
      in_tree[u] = 1;
      tree.push_back(ordered(static_cast<int>(u), next[u]));
    }
  }
  return tree;
}

TreeEdges spanning_tree(const Subgraph& sub, TreeSampler sampler, Rng& rng) {
  TreeEdges tree = sampler == TreeSampler::Broder ? broder_spanning_tree(sub, rng) : wilson_spanning_tree(sub, rng);
#ifndef NDEBUG
  if (tree.size() + 1 != sub.size()) throw Error("spanning_tree: wrong edge count");
#endif
  return tree;
}

int recenter_medoid(std::size_t vertex_count, std::span<const std::pair<int, int>> tree, int m, MedoidRule rule) {
  const int n = static_cast<int>(vertex_count);
  if (m < 0 || m >= n) throw Error("recenter_medoid: medoid not in tree");
  if (tree.size() + 1 != vertex_count) throw Error("recenter_medoid: not a spanning tree (edge count)");
  std::vector<std::vector<int>> adj(vertex_count);
  for (auto [a, b] : tree) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw Error("recenter_medoid: bad tree edge");
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());

  // Rooted at `root`: parent, BFS order and depth.
  std::vector<int> parent(vertex_count), order, depth(vertex_count);
  auto root_at = [&](int root) {
    order.clear();
    std::fill(parent.begin(), parent.end(), -2);
    parent[static_cast<std::size_t>(root)] = -1;
    depth[static_cast<std::size_t>(root)] = 0;
    order.push_back(root);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int v = order[i];
      for (int u : adj[static_cast<std::size_t>(v)]) {
        if (parent[static_cast<std::size_t>(u)] != -2) continue;
        parent[static_cast<std::size_t>(u)] = v;
        depth[static_cast<std::size_t>(u)] = depth[static_cast<std::size_t>(v)] + 1;
        order.push_back(u);
      }
    }
    if (order.size() != vertex_count) throw Error("recenter_medoid: tree is disconnected");
  };

  // Returns the neighbour of `root` to move to, or -1.
  auto dominant = [&](int root) -> int {
    root_at(root);
    if (rule == MedoidRule::Branch) {
      std::vector<long long> size(vertex_count, 1);
      for (std::size_t i = order.size(); i-- > 1;)
        size[static_cast<std::size_t>(parent[static_cast<std::size_t>(order[i])])] += size[static_cast<std::size_t>(order[i])];
      // A branch through child u holds size[u] edges (its subtree plus the
      // connecting edge); the other branches hold the remaining n-1-size[u].
      for (int u : adj[static_cast<std::size_t>(root)]) {
        const long long c = size[static_cast<std::size_t>(u)];
        if (c > (n - 1) - c) return u;
      }
      return -1;
    }
    // Root-to-leaf paths; the longest must beat the others' total length.
    long long sum = 0, best = -1;
    int best_leaf = -1;
    bool tie = false;
    for (int v : order) {
      if (v == root || adj[static_cast<std::size_t>(v)].size() != 1) continue;
      const long long len = depth[static_cast<std::size_t>(v)];
      sum += len;
      if (len > best) {
        best = len;
        best_leaf = v;
        tie = false;
      } else if (len == best) {
        tie = true;
      }
    }
    if (best_leaf < 0 || tie || best <= sum - best) return -1;
    int v = best_leaf;
    while (parent[static_cast<std::size_t>(v)] != root) v = parent[static_cast<std::size_t>(v)];
    return v;
  };

  for (int step = 0; step < n; ++step) {
    const int next = dominant(m);
    if (next < 0) break;
    // Two centroids point at each other; settle on the lower index so the
    // result is a fixed point.
    if (dominant(next) == m) return std::min(m, next);
    m = next;
  }
  return m;
}

KMedoidsResult run_kmedoids(const DualGraph& graph, const KMedoidsConfig& config, Rng& rng,
                            const std::function<void(const DistrictingPlan&)>& on_plan) {
  const int k = config.k;
  const std::size_t n = graph.vertex_count();
  if (k < 1) throw Error("run_kmedoids: k must be at least 1");
  if (static_cast<std::size_t>(k) > n) throw Error("run_kmedoids: k exceeds the number of vertices");
  if (config.max_iterations < 1) throw Error("run_kmedoids: max_iterations must be at least 1");

  // Partial Fisher-Yates: the first k slots become the medoids.
  std::vector<VertexIndex> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i)
    std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  MedoidSet medoids(pool.begin(), pool.begin() + k);

  std::optional<DistrictingPlan> best;
  KMedoidsResult result{DistrictingPlan(graph, k), 0.0, 0, {}, {}};
  std::set<std::vector<DistrictIndex>> harvested_keys;

  for (int it = 1; it <= config.max_iterations; ++it) {
    DistrictingPlan plan = grow_districts(graph, medoids);
    if (on_plan) on_plan(plan);
    const double dev = deviation(graph, plan);
    result.dev_history.push_back(dev);
    result.iterations_run = it;
    if (dev < config.harvest_threshold && harvested_keys.insert(plan.canonical_assignment()).second)
      result.harvested_plans.push_back(plan);
    if (!best || dev < result.best_dev) {
      best = plan;
      result.best_dev = dev;
    }
    if (dev < config.dev_target || it == config.max_iterations) break;

    for (DistrictIndex d = 0; d < k; ++d) {
      const Subgraph sub = induced_district_subgraph(graph, plan, d);
      const VertexIndex m = medoids[static_cast<std::size_t>(d)];
      const int local = static_cast<int>(std::lower_bound(sub.vertices.begin(), sub.vertices.end(), m) - sub.vertices.begin());
      const TreeEdges tree = spanning_tree(sub, config.sampler, rng);
      medoids[static_cast<std::size_t>(d)] = sub.vertices[static_cast<std::size_t>(
          recenter_medoid(sub.size(), tree, local, config.medoid_rule))];
    }
  }
  result.best_plan = std::move(*best);
  return result;
}

}  // namespace redistrict
