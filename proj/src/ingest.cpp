#include "redistrict/ingest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace redistrict {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct QPoint {
  std::int64_t x, y;
  friend bool operator==(const QPoint&, const QPoint&) = default;
  friend auto operator<=>(const QPoint&, const QPoint&) = default;
};

struct SegmentKey {
  QPoint a, b;
  friend bool operator==(const SegmentKey&, const SegmentKey&) = default;
};

struct SegmentHash {
  std::size_t operator()(const SegmentKey& s) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : {s.a.x, s.a.y, s.b.x, s.b.y}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Ring parse_ring(const json& coords, const std::string& where) {
  if (!coords.is_array()) throw ParseError(where + ": ring is not an array");
  Ring ring;
  for (const auto& p : coords) {
    if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number())
      throw ParseError(where + ": malformed coordinate");
    ring.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw ParseError(where + ": ring has fewer than 3 distinct points");
  return ring;
}

void parse_polygon(const json& rings, const std::string& where, GeometryRecord& rec) {
  if (!rings.is_array() || rings.empty()) throw ParseError(where + ": polygon has no rings");
  for (std::size_t i = 0; i < rings.size(); ++i) {
    auto ring = parse_ring(rings[i], where);
    (i == 0 ? rec.polygons : rec.holes).push_back(std::move(ring));
  }
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError("id must be a string or integer");
}

json ring_json(const Ring& ring) {
  json out = json::array();
  for (const auto& p : ring) out.push_back({p.x, p.y});
  if (!ring.empty()) out.push_back({ring.front().x, ring.front().y});
  return out;
}

}  // namespace

std::vector<std::pair<VertexIndex, VertexIndex>> rook_adjacency(std::span<const RawUnit> units,
                                                               const AdjacencyOptions& options) {
  const double scale = std::pow(10.0, options.decimal_places);
  auto quantize = [&](const Point& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParseError("non-finite coordinate");
    return QPoint{std::llround(p.x * scale), std::llround(p.y * scale)};
  };

  std::unordered_map<SegmentKey, std::vector<VertexIndex>, SegmentHash> owners;
  for (std::size_t u = 0; u < units.size(); ++u) {
    auto add_ring = [&](const Ring& ring) {
      if (ring.size() < 3) throw ParseError("unit '" + units[u].id + "' has a malformed ring");
      for (std::size_t i = 0; i < ring.size(); ++i) {
        QPoint a = quantize(ring[i]), b = quantize(ring[(i + 1) % ring.size()]);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        auto& list = owners[{a, b}];
        if (list.empty() || list.back() != static_cast<VertexIndex>(u)) list.push_back(static_cast<VertexIndex>(u));
      }
    };
    for (const auto& ring : units[u].polygons) add_ring(ring);
    for (const auto& ring : units[u].holes) add_ring(ring);
  }

  std::map<std::pair<VertexIndex, VertexIndex>, double> shared;
  for (const auto& [seg, list] : owners) {
    if (list.size() < 2) continue;
    const double len = std::hypot(static_cast<double>(seg.b.x - seg.a.x), static_cast<double>(seg.b.y - seg.a.y)) / scale;
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        if (list[i] == list[j]) continue;
        shared[{std::min(list[i], list[j]), std::max(list[i], list[j])}] += len;
      }
  }
  std::vector<std::pair<VertexIndex, VertexIndex>> edges;
  for (const auto& [pair, len] : shared)
    if (len > options.min_shared_length) edges.push_back(pair);
  return edges;
}

std::vector<RawUnit> county_premerge(std::span<const RawUnit> units, int k) {
  if (k < 1) throw Error("county_premerge: k must be at least 1");
  Population total = 0;
  std::unordered_map<std::string, Population> county_pop;
  for (const auto& u : units) {
    if (u.county.empty()) throw Error("county_premerge: unit '" + u.id + "' has no county tag");
    total += u.population;
    county_pop[u.county] += u.population;
  }
  // county_pop < total / k, compared exactly.
  auto merges = [&](const std::string& county) { return county_pop[county] * k < total; };

  std::vector<RawUnit> out;
  std::unordered_map<std::string, std::size_t> merged_slot;
  std::unordered_set<std::string> kept_ids;
  for (const auto& u : units) {
    if (!merges(u.county)) {
      out.push_back(u);
      kept_ids.insert(u.id);
      continue;
    }
    auto [it, fresh] = merged_slot.try_emplace(u.county, out.size());
    if (fresh) {
      RawUnit m;
      m.id = u.county;
      m.county = u.county;
      out.push_back(std::move(m));
    }
    RawUnit& m = out[it->second];
    m.population += u.population;
    m.polygons.insert(m.polygons.end(), u.polygons.begin(), u.polygons.end());
    m.holes.insert(m.holes.end(), u.holes.begin(), u.holes.end());
  }
  for (const auto& [county, _] : merged_slot)
    if (kept_ids.contains(county))
      throw Error("county_premerge: merged county id '" + county + "' collides with a unit id");
  return out;
}

std::vector<RawUnit> read_population_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return path.string() + ":" + std::to_string(lineno); };

  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header[0] != "id" || header[1] != "population")
    throw ParseError(where() + ": expected header id,population[,county]");
  const bool has_county = header.size() >= 3 && header[2] == "county";

  std::vector<RawUnit> units;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 2) throw ParseError(where() + ": expected at least 2 fields");
    RawUnit u;
    u.id = trim(fields[0]);
    if (u.id.empty()) throw ParseError(where() + ": empty id");
    const std::string pop = trim(fields[1]);
    std::size_t used = 0;
    try {
      u.population = std::stoll(pop, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != pop.size()) throw ParseError(where() + ": population '" + pop + "' is not an integer");
    if (u.population < 0) throw ParseError(where() + ": negative population");
    if (has_county && fields.size() >= 3) u.county = trim(fields[2]);
    if (!seen.insert(u.id).second) throw ParseError(where() + ": duplicate id '" + u.id + "'");
    units.push_back(std::move(u));
  }
  if (units.empty()) throw ParseError(path.string() + ": no data rows");
  return units;
}

void write_population_csv(const std::filesystem::path& path, std::span<const RawUnit> units) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "id,population,county\n";
  for (const auto& u : units) out << csv_escape(u.id) << ',' << u.population << ',' << csv_escape(u.county) << '\n';
}

std::vector<GeometryRecord> read_geometry_geojson(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features") || !doc["features"].is_array())
    throw ParseError(path.string() + ": expected a GeoJSON FeatureCollection");

  std::vector<GeometryRecord> out;
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = path.string() + ": feature " + std::to_string(index++);
    if (!f.contains("properties") || !f["properties"].is_object() || !f["properties"].contains("id"))
      throw ParseError(where + ": missing properties.id");
    GeometryRecord rec;
    rec.id = id_string(f["properties"]["id"]);
    const auto& g = f.value("geometry", json());
    if (!g.is_object()) throw ParseError(where + ": missing geometry");
    const std::string type = g.value("type", "");
    if (type == "Polygon") {
      parse_polygon(g.at("coordinates"), where, rec);
    } else if (type == "MultiPolygon") {
      if (!g.at("coordinates").is_array()) throw ParseError(where + ": malformed MultiPolygon");
      for (const auto& poly : g["coordinates"]) parse_polygon(poly, where, rec);
    } else {
      throw ParseError(where + ": unsupported geometry type '" + type + "'");
    }
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw ParseError(path.string() + ": no features");
  return out;
}

void write_geometry_geojson(const std::filesystem::path& path, std::span<const RawUnit> units) {
  json features = json::array();
  for (const auto& u : units) {
    // Holes cannot be re-attached to their outer ring once flattened, so only
    // outer rings are written.
    json polys = json::array();
    for (const auto& ring : u.polygons) polys.push_back(json::array({ring_json(ring)}));
    json geom = polys.size() == 1 ? json{{"type", "Polygon"}, {"coordinates", polys[0]}}
                                  : json{{"type", "MultiPolygon"}, {"coordinates", polys}};
    features.push_back({{"type", "Feature"}, {"properties", {{"id", u.id}}}, {"geometry", geom}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << json{{"type", "FeatureCollection"}, {"features", features}}.dump() << '\n';
}

DualGraph build_graph(std::vector<RawUnit> units, std::vector<std::pair<VertexIndex, VertexIndex>> edges) {
  std::vector<TabulationBlock> blocks;
  blocks.reserve(units.size());
  for (auto& u : units) {
    TabulationBlock b;
    b.id = std::move(u.id);
    b.population = u.population;
    b.polygons = std::move(u.polygons);
    if (!u.county.empty()) b.county = std::move(u.county);
    blocks.push_back(std::move(b));
  }
  return DualGraph(std::move(blocks), std::move(edges));
}

LoadedGraph load_graph(const std::filesystem::path& population_csv,
                       const std::filesystem::path& geometry,
                       const LoadOptions& options) {
  auto units = read_population_csv(population_csv);
  auto shapes = read_geometry_geojson(geometry);

  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < units.size(); ++i) by_id.emplace(units[i].id, i);
  std::vector<char> matched(units.size(), 0);
  for (auto& rec : shapes) {
    auto it = by_id.find(rec.id);
    if (it == by_id.end()) throw ParseError(geometry.string() + ": id '" + rec.id + "' not present in " + population_csv.string());
    if (matched[it->second]) throw ParseError(geometry.string() + ": duplicate feature id '" + rec.id + "'");
    matched[it->second] = 1;
    units[it->second].polygons = std::move(rec.polygons);
    units[it->second].holes = std::move(rec.holes);
  }
  for (std::size_t i = 0; i < units.size(); ++i)
    if (!matched[i]) throw ParseError(population_csv.string() + ": id '" + units[i].id + "' has no geometry in " + geometry.string());

  if (options.premerge_k) units = county_premerge(units, *options.premerge_k);
  auto edges = rook_adjacency(units, options.adjacency);

  Provenance prov;
  prov.files.emplace_back(population_csv.string(), file_sha256(population_csv));
  prov.files.emplace_back(geometry.string(), file_sha256(geometry));
  return {build_graph(std::move(units), std::move(edges)), std::move(prov)};
}

LoadedGraph load_adjacency_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array() || !doc.contains("edges") ||
      !doc["edges"].is_array())
    throw ParseError(path.string() + ": expected {\"vertices\": [...], \"edges\": [...]}");

  std::vector<RawUnit> units;
  for (std::size_t i = 0; i < doc["vertices"].size(); ++i) {
    const auto& v = doc["vertices"][i];
    const std::string where = path.string() + ": vertices[" + std::to_string(i) + "]";
    if (!v.is_object() || !v.contains("id") || !v.contains("population")) throw ParseError(where + ": needs id and population");
    RawUnit u;
    u.id = id_string(v["id"]);
    if (!v["population"].is_number_integer()) throw ParseError(where + ": population must be an integer");
    u.population = v["population"].get<Population>();
    if (u.population < 0) throw ParseError(where + ": negative population");
    if (v.contains("county") && v["county"].is_string()) u.county = v["county"].get<std::string>();
    units.push_back(std::move(u));
  }
  std::vector<std::pair<VertexIndex, VertexIndex>> edges;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError(path.string() + ": edges[" + std::to_string(i) + "] must be [i, j]");
    edges.emplace_back(e[0].get<VertexIndex>(), e[1].get<VertexIndex>());
  }
  Provenance prov;
  prov.files.emplace_back(path.string(), sha256_hex(text));
  return {build_graph(std::move(units), std::move(edges)), std::move(prov)};
}

void write_adjacency_json(const std::filesystem::path& path, const DualGraph& graph) {
  json vertices = json::array();
  for (const auto& b : graph.blocks()) {
    json v{{"id", b.id}, {"population", b.population}};
    if (b.county) v["county"] = *b.county;
    vertices.push_back(std::move(v));
  }
  json edges = json::array();
  for (auto [a, b] : graph.edges()) edges.push_back({a, b});
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << json{{"vertices", vertices}, {"edges", edges}}.dump() << '\n';
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string graph_hash(const DualGraph& graph) {
  std::string canon;
  for (const auto& b : graph.blocks()) {
    canon += b.id;
    canon += '\t';
    canon += std::to_string(b.population);
    canon += '\n';
  }
  for (auto [a, b] : graph.edges()) {
    canon += std::to_string(a);
    canon += ' ';
    canon += std::to_string(b);
    canon += '\n';
  }
  return sha256_hex(canon);
}

}  // namespace redistrict
