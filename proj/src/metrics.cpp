#include "redistrict/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace redistrict {

double pop_star(const DualGraph& graph, int k) {
  if (k < 1) throw Error("pop_star: k must be at least 1");
  return static_cast<double>(graph.total_population()) / k;
}

double district_deviation(Population district_pop, Population total, int k) {
  if (total == 0) return 0.0;
  const Population diff = std::llabs(static_cast<long long>(district_pop) * k - total);
  return static_cast<double>(diff) / static_cast<double>(total) * 100.0;
}

double deviation(const DualGraph& graph, const DistrictingPlan& plan) {
  if (!plan.complete()) throw Error("deviation: plan is incomplete");
  double worst = 0.0;
  for (Population p : plan.district_populations())
    worst = std::max(worst, district_deviation(p, graph.total_population(), plan.k()));
  return worst;
}

double polygon_area(const Ring& ring) {
  double twice = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::optional<double> convex_hull_compactness(const DualGraph& graph, std::span<const VertexIndex> members) {
  if (members.empty()) return std::nullopt;
  double area = 0.0;
  std::vector<Point> pts;
  for (VertexIndex v : members) {
    const auto& block = graph.block(v);
    if (!block.has_geometry()) return std::nullopt;
    for (const auto& ring : block.polygons) {
      area += polygon_area(ring);
      pts.insert(pts.end(), ring.begin(), ring.end());
    }
  }
  const double hull_area = polygon_area(convex_hull(std::move(pts)));
  if (!(hull_area > 0.0)) return std::nullopt;
  double ratio = area / hull_area;
  // Rounding can push a convex district a hair above 1.
  if (ratio > 1.0 && ratio < 1.0 + 1e-9) ratio = 1.0;
  return std::clamp(ratio, 0.0, 1.0);
}

std::optional<double> mean_compactness(std::span<const std::optional<double>> values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(values.size());
}

PlanMetrics evaluate(const DualGraph& graph, const DistrictingPlan& plan, bool with_compactness) {
  if (!plan.complete()) throw Error("evaluate: plan is incomplete");
  PlanMetrics m;
  m.pop_star = pop_star(graph, plan.k());
  m.district_pops = plan.district_populations();
  for (Population p : m.district_pops)
    m.district_devs.push_back(district_deviation(p, graph.total_population(), plan.k()));
  m.dev_percent = *std::max_element(m.district_devs.begin(), m.district_devs.end());
  if (with_compactness && graph.has_geometry()) {
    for (DistrictIndex d = 0; d < plan.k(); ++d) {
      auto members = plan.members(d);
      m.district_compactness.push_back(convex_hull_compactness(graph, members));
    }
    m.mean_compactness = mean_compactness(m.district_compactness);
  }
  return m;
}

}  // namespace redistrict
