#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "redistrict/graph.hpp"

namespace redistrict {

class ParseError : public Error {
 public:
  using Error::Error;
};

/// One geographic unit as read from disk, before graph construction.
struct RawUnit {
  std::string id;
  Population population = 0;
  std::string county;
  /// Outer rings, one per polygon.
  std::vector<Ring> polygons;
  /// Inner rings. Only used for adjacency; areas ignore holes.
  std::vector<Ring> holes;
};

struct AdjacencyOptions {
  /// Coordinates are rounded to this many decimal places before segments are
  /// compared.
  int decimal_places = 7;
  /// Two units are adjacent when their shared boundary is strictly longer.
  double min_shared_length = 0.0;
};

/// Rook adjacency: units are adjacent when they share at least one boundary
/// segment (after quantization) with total length above the tolerance.
/// Corner-only contact never produces an edge. Returns sorted (lo, hi) pairs.
std::vector<std::pair<VertexIndex, VertexIndex>> rook_adjacency(std::span<const RawUnit> units,
                                                               const AdjacencyOptions& options = {});

/// Replaces every county whose total population is below total/k by a single
/// unit (id = county tag, polygons concatenated). Order of first occurrence is
/// kept.
std::vector<RawUnit> county_premerge(std::span<const RawUnit> units, int k);

/// `id,population[,county]` with a header row.
std::vector<RawUnit> read_population_csv(const std::filesystem::path& path);
void write_population_csv(const std::filesystem::path& path, std::span<const RawUnit> units);

/// FeatureCollection of Polygon / MultiPolygon features keyed by the `id`
/// property. Returns (id, outer rings, holes) in file order.
struct GeometryRecord {
  std::string id;
  std::vector<Ring> polygons;
  std::vector<Ring> holes;
};
std::vector<GeometryRecord> read_geometry_geojson(const std::filesystem::path& path);
void write_geometry_geojson(const std::filesystem::path& path, std::span<const RawUnit> units);

struct Provenance {
  std::vector<std::pair<std::string, std::string>> files;  // path, sha256
};

struct LoadedGraph {
  DualGraph graph;
  Provenance provenance;
};

struct LoadOptions {
  AdjacencyOptions adjacency;
  /// When set, county_premerge(k) runs before the graph is built.
  std::optional<int> premerge_k;
};

/// Population CSV joined 1:1 with a GeoJSON file, rook adjacency computed.
LoadedGraph load_graph(const std::filesystem::path& population_csv,
                       const std::filesystem::path& geometry,
                       const LoadOptions& options = {});

/// Precomputed adjacency (no geometry):
/// {"vertices":[{"id":..,"population":..,"county":..}], "edges":[[i,j],...]}
LoadedGraph load_adjacency_json(const std::filesystem::path& path);
void write_adjacency_json(const std::filesystem::path& path, const DualGraph& graph);

/// Builds a graph from units and explicit edges.
DualGraph build_graph(std::vector<RawUnit> units, std::vector<std::pair<VertexIndex, VertexIndex>> edges);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);
/// Hash of vertex ids, populations and edges; independent of how the graph
/// was loaded.
std::string graph_hash(const DualGraph& graph);

}  // namespace redistrict
