#pragma once

#include <optional>
#include <span>
#include <vector>

#include "redistrict/graph.hpp"

namespace redistrict {

/// Ideal district population: total population / k. Throws Error for k < 1.
double pop_star(const DualGraph& graph, int k);

/// Percent deviation of one district population from the ideal. Computed as
/// |k*pop - total| / total * 100 so integer inputs are combined exactly
/// before the single division.
double district_deviation(Population district_pop, Population total, int k);

/// Maximum absolute percent deviation over all districts. Throws Error on an
/// incomplete plan.
double deviation(const DualGraph& graph, const DistrictingPlan& plan);

/// Shoelace area (absolute value) of a ring.
double polygon_area(const Ring& ring);

/// Convex hull (counter-clockwise, no repeated endpoint, collinear points
/// dropped) by Andrew's monotone chain.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Summed member polygon area over the area of the hull of all member
/// vertices, clamped to [0, 1]. nullopt when any member lacks geometry.
std::optional<double> convex_hull_compactness(const DualGraph& graph, std::span<const VertexIndex> members);

/// Arithmetic mean; nullopt when any value is absent or the input is empty.
std::optional<double> mean_compactness(std::span<const std::optional<double>> values);

struct PlanMetrics {
  double pop_star = 0.0;
  double dev_percent = 0.0;
  std::vector<double> district_devs;
  std::vector<Population> district_pops;
  std::optional<double> mean_compactness;
  std::vector<std::optional<double>> district_compactness;
};

/// All metrics for a complete plan. Compactness is skipped (left absent) when
/// with_compactness is false.
PlanMetrics evaluate(const DualGraph& graph, const DistrictingPlan& plan, bool with_compactness = true);

}  // namespace redistrict
