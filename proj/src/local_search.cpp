#include "redistrict/local_search.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "redistrict/metrics.hpp"

namespace redistrict {

Neighborhood parse_neighborhood(std::string_view name) {
  if (name == "flip") return Neighborhood::Flip;
  if (name == "swap") return Neighborhood::Swap;
  if (name == "cmb") return Neighborhood::Cmb;
  throw Error("unknown neighborhood '" + std::string(name) + "' (expected flip, swap or cmb)");
}

std::string_view to_string(Neighborhood nf) {
  switch (nf) {
    case Neighborhood::Flip: return "flip";
    case Neighborhood::Swap: return "swap";
    case Neighborhood::Cmb: return "cmb";
  }
  return "?";
}

namespace {

struct PairContext {
  std::vector<VertexIndex> heavy_border;  // in heavy, touching light, not a cut vertex
  std::vector<VertexIndex> light_border;  // in light, touching heavy, not a cut vertex
  std::size_t heavy_size = 0;
};

bool touches(const DualGraph& graph, const DistrictingPlan& plan, VertexIndex v, DistrictIndex d, VertexIndex except) {
  for (VertexIndex u : graph.neighbors(v))
    if (u != except && plan.district(u) == d) return true;
  return false;
}

PairContext pair_context(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex heavy, DistrictIndex light,
                         bool need_light) {
  if (heavy < 0 || heavy >= plan.k() || light < 0 || light >= plan.k() || heavy == light)
    throw Error("local search: invalid district pair");
  PairContext ctx;
  const Subgraph hs = induced_district_subgraph(graph, plan, heavy);
  ctx.heavy_size = hs.size();
  if (hs.size() == 0) return ctx;
  const auto cut_h = articulation_points(hs);
  for (VertexIndex v : hs.vertices)
    if (touches(graph, plan, v, light, kNoVertex) && !std::binary_search(cut_h.begin(), cut_h.end(), v))
      ctx.heavy_border.push_back(v);
  if (need_light) {
    const Subgraph ls = induced_district_subgraph(graph, plan, light);
    if (ls.size() == 0) return ctx;
    const auto cut_l = articulation_points(ls);
    for (VertexIndex v : ls.vertices)
      if (touches(graph, plan, v, heavy, kNoVertex) && !std::binary_search(cut_l.begin(), cut_l.end(), v))
        ctx.light_border.push_back(v);
  }
  return ctx;
}

std::vector<Move> raw_flips(const PairContext& ctx, DistrictIndex heavy, DistrictIndex light) {
  std::vector<Move> out;
  if (ctx.heavy_size <= 1) return out;
  for (VertexIndex v : ctx.heavy_border) out.push_back({v, kNoVertex, heavy, light});
  return out;
}

// Swaps meeting the pairwise conditions; contiguity not yet verified.
std::vector<Move> raw_swaps(const DualGraph& graph, const DistrictingPlan& plan, const PairContext& ctx,
                            DistrictIndex heavy, DistrictIndex light) {
  std::vector<Move> out;
  for (VertexIndex vi : ctx.heavy_border)
    for (VertexIndex vj : ctx.light_border)
      if (touches(graph, plan, vi, light, vj) && touches(graph, plan, vj, heavy, vi)) out.push_back({vi, vj, heavy, light});
  return out;
}

// Is district d connected once `removed` leaves and `added` joins?
bool connected_after(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex d, VertexIndex removed,
                     VertexIndex added) {
  auto inside = [&](VertexIndex v) { return v == added || (v != removed && plan.district(v) == d); };
  std::vector<char> seen(graph.vertex_count(), 0);
  std::vector<VertexIndex> stack{added};
  seen[static_cast<std::size_t>(added)] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const VertexIndex v = stack.back();
    stack.pop_back();
    for (VertexIndex u : graph.neighbors(v)) {
      if (seen[static_cast<std::size_t>(u)] || !inside(u)) continue;
      seen[static_cast<std::size_t>(u)] = 1;
      ++reached;
      stack.push_back(u);
    }
  }
  return reached == plan.district_size(d);  // one out, one in
}

bool swap_keeps_contiguity(const DualGraph& graph, const DistrictingPlan& plan, const Move& m) {
  return connected_after(graph, plan, m.heavy, m.v_out, m.v_in) && connected_after(graph, plan, m.light, m.v_in, m.v_out);
}

void apply(const DualGraph& graph, DistrictingPlan& plan, const Move& m) {
  plan.assign(graph, m.v_out, m.light);
  if (!m.is_flip()) plan.assign(graph, m.v_in, m.heavy);
}

}  // namespace

std::vector<Move> flip_candidates(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex heavy,
                                  DistrictIndex light) {
  return raw_flips(pair_context(graph, plan, heavy, light, false), heavy, light);
}

std::vector<Move> swap_candidates(const DualGraph& graph, const DistrictingPlan& plan, DistrictIndex heavy,
                                  DistrictIndex light) {
  auto moves = raw_swaps(graph, plan, pair_context(graph, plan, heavy, light, true), heavy, light);
  std::erase_if(moves, [&](const Move& m) { return !swap_keeps_contiguity(graph, plan, m); });
  return moves;
}

Population score_key(const DualGraph& graph, const DistrictingPlan& plan, const Move& move) {
  const Population out = graph.population(move.v_out);
  const Population in = move.is_flip() ? 0 : graph.population(move.v_in);
  const Population k = plan.k();
  const Population total = graph.total_population();
  const Population heavy = plan.district_population(move.heavy) - out + in;
  const Population light = plan.district_population(move.light) + out - in;
  return std::max(std::llabs(k * heavy - total), std::llabs(k * light - total));
}

double score_move(const DualGraph& graph, const DistrictingPlan& plan, const Move& move) {
  const Population total = graph.total_population();
  if (total == 0) return 0.0;
  return static_cast<double>(score_key(graph, plan, move)) / static_cast<double>(total);
}

TabuList::Key TabuList::key(const Move& m) {
  return {std::min(m.v_out, m.v_in), std::max(m.v_out, m.v_in), std::min(m.heavy, m.light), std::max(m.heavy, m.light)};
}

void TabuList::add(const Move& move, int iteration) { expiry_[key(move)] = iteration + 1 + tenure_; }

bool TabuList::is_tabu(const Move& move, int iteration) const {
  auto it = expiry_.find(key(move));
  return it != expiry_.end() && iteration < it->second;
}

LocalSearchTrace local_search(const DualGraph& graph, DistrictingPlan plan, const LocalSearchConfig& config,
                              const std::function<void(const DistrictingPlan&)>& on_move) {
  if (config.max_iterations < 0) throw Error("local_search: max_iterations must be nonnegative");
  if (!plan.complete()) throw Error("local_search: plan is incomplete");
  const bool use_flip = config.neighborhood != Neighborhood::Swap;
  const bool use_swap = config.neighborhood != Neighborhood::Flip;
  TabuList tabu(config.max_iterations / 10);

  LocalSearchTrace trace{{}, plan, 0.0, 0.0, 0, false};
  double dev = deviation(graph, plan);
  trace.initial_dev = dev;
  int it = 0;
  while (dev >= config.dev_target && it < config.max_iterations) {
    bool moved = false;
    for (const BorderPair& pair : border_pairs(graph, plan)) {
      const PairContext ctx = pair_context(graph, plan, pair.heavy, pair.light, use_swap);
      std::vector<Move> cands;
      if (use_flip) cands = raw_flips(ctx, pair.heavy, pair.light);
      if (use_swap) {
        auto swaps = raw_swaps(graph, plan, ctx, pair.heavy, pair.light);
        cands.insert(cands.end(), swaps.begin(), swaps.end());
      }
      std::erase_if(cands, [&](const Move& m) { return tabu.is_tabu(m, it); });
      if (cands.empty()) continue;

      std::vector<std::pair<Population, std::size_t>> ranked;
      ranked.reserve(cands.size());
      for (std::size_t i = 0; i < cands.size(); ++i) ranked.emplace_back(score_key(graph, plan, cands[i]), i);
      std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        const Move& ma = cands[a.second];
        const Move& mb = cands[b.second];
        return std::tuple(a.first, !ma.is_flip(), ma.v_out, ma.v_in) < std::tuple(b.first, !mb.is_flip(), mb.v_out, mb.v_in);
      });
      // Swaps are checked for contiguity lazily, best first.
      for (const auto& [key, i] : ranked) {
        const Move& m = cands[i];
        if (!m.is_flip() && !swap_keeps_contiguity(graph, plan, m)) continue;
        const double score = score_move(graph, plan, m);
        apply(graph, plan, m);
        tabu.add(m, it);
        if (on_move) on_move(plan);
        dev = deviation(graph, plan);
        trace.steps.push_back({m, score, dev});
        moved = true;
        break;
      }
      if (moved) break;
    }
    if (!moved) {
      trace.exhausted = true;
      break;
    }
    ++it;
  }
  trace.iterations = it;
  trace.final_dev = dev;
  trace.plan = std::move(plan);
  return trace;
}

}  // namespace redistrict
