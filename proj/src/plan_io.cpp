#include "redistrict/plan_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "redistrict/ingest.hpp"

namespace redistrict {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_to_json(const PlanMetrics& m) {
  json comps = json::array();
  for (const auto& c : m.district_compactness) comps.push_back(optional_json(c));
  return {{"pop_star", m.pop_star},
          {"dev_percent", m.dev_percent},
          {"district_devs", m.district_devs},
          {"district_pops", m.district_pops},
          {"mean_compactness", optional_json(m.mean_compactness)},
          {"district_compactness", comps}};
}

json config_to_json(const RunConfig& c) {
  return {{"k", c.k},
          {"mi", c.mi},
          {"li", c.li},
          {"nf", std::string(to_string(c.nf))},
          {"uc", c.uc.to_string()},
          {"dev_target", c.dev_target},
          {"harvest_threshold", c.harvest_threshold},
          {"refine_harvest", c.refine_harvest},
          {"tree_sampler", std::string(to_string(c.sampler))},
          {"medoid_rule", std::string(to_string(c.medoid_rule))}};
}

std::string json_quote(const std::string& s) { return json(s).dump(); }

// Line of the first `"key":` in the text; 0 when not found.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const std::string needle = json_quote(key);
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    std::size_t after = pos + needle.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':')
      return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
  }
  return 0;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << v;
  return out.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_prefix(const std::string& state, const RunConfig& c) {
  return state + "," + std::to_string(c.li) + ",\"" + c.uc.to_string() + "\"," + std::string(to_string(c.nf));
}

}  // namespace

std::string metrics_json(const PlanMetrics& metrics, int indent) { return metrics_to_json(metrics).dump(indent); }

std::string plan_json(const DualGraph& graph, const std::string& graph_hash, const DistrictingPlan& plan,
                      const PlanMetrics& metrics, const RunConfig& config, std::uint64_t seed) {
  if (plan.size() != graph.vertex_count()) throw Error("plan_json: plan does not match graph");
  json assignment = json::object();
  for (std::size_t v = 0; v < plan.size(); ++v)
    assignment[graph.block(static_cast<VertexIndex>(v)).id] = plan.district(static_cast<VertexIndex>(v));
  json doc{{"graph_hash", graph_hash},
           {"k", plan.k()},
           {"assignment", assignment},
           {"metrics", metrics_to_json(metrics)},
           {"config", config_to_json(config)},
           {"seed", seed}};
  return doc.dump(2) + "\n";
}

void write_plan(const std::filesystem::path& path, const std::string& json_text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << json_text;
}

PlanFile parse_plan(const std::string& text, const std::string& source, const DualGraph& graph, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "line L, column C" in its message.
    throw ParseError(source + ": " + e.what());
  }
  auto fail = [&](const std::string& key, const std::string& what) -> ParseError {
    const std::size_t line = key.empty() ? 0 : line_of_key(text, key);
    return ParseError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what);
  };
  if (!doc.is_object()) throw fail("", "top level must be an object");
  for (const char* key : {"k", "assignment"})
    if (!doc.contains(key)) throw fail("", std::string("missing \"") + key + "\"");
  if (!doc["k"].is_number_integer() || doc["k"].get<long long>() < 1) throw fail("k", "\"k\" must be a positive integer");
  const int k = doc["k"].get<int>();
  if (!doc["assignment"].is_object()) throw fail("assignment", "\"assignment\" must be an object");

  PlanFile out{DistrictingPlan(graph, k), {}, std::nullopt, {}};
  if (doc.contains("graph_hash")) {
    if (!doc["graph_hash"].is_string()) throw fail("graph_hash", "\"graph_hash\" must be a string");
    out.graph_hash = doc["graph_hash"].get<std::string>();
    const std::string actual = graph_hash(graph);
    if (out.graph_hash != actual) {
      const std::string msg = "graph hash " + out.graph_hash + " does not match the loaded graph (" + actual + ")";
      if (strict) throw fail("graph_hash", msg);
      out.warnings.push_back(msg);
    }
  } else {
    out.warnings.push_back("plan carries no graph hash");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw fail("seed", "\"seed\" must be a nonnegative integer");
    out.seed = doc["seed"].get<std::uint64_t>();
  }

  std::vector<DistrictIndex> assignment(graph.vertex_count(), kUnassigned);
  for (const auto& [id, value] : doc["assignment"].items()) {
    const auto v = graph.find(id);
    if (!v) throw fail(id, "unknown id '" + id + "'");
    if (!value.is_number_integer()) throw fail(id, "district for '" + id + "' must be an integer");
    const long long d = value.get<long long>();
    if (d < 0 || d >= k) throw fail(id, "district " + std::to_string(d) + " for '" + id + "' is outside 0.." + std::to_string(k - 1));
    assignment[static_cast<std::size_t>(*v)] = static_cast<DistrictIndex>(d);
  }
  for (std::size_t v = 0; v < assignment.size(); ++v)
    if (assignment[v] == kUnassigned)
      throw fail("assignment", "id '" + graph.block(static_cast<VertexIndex>(v)).id + "' is not assigned");
  out.plan = DistrictingPlan(graph, k, std::move(assignment));
  return out;
}

PlanFile read_plan(const std::filesystem::path& path, const DualGraph& graph, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path.string(), graph, strict);
}

std::string summary_csv_header() {
  return "state,li,uc,nf,kmed_mean_dev,kmed_mean_comp,ls_mean_dev,ls_min_dev,ls_mean_comp,alg_runtime_s,total_runtime_s\n";
}

std::string summary_csv_row(const std::string& state, const RunConfig& config, const EnsembleSummary& s) {
  return csv_prefix(state, config) + "," + fmt(s.kmed_mean_dev) + "," + fmt(s.kmed_mean_comp) + "," + fmt(s.ls_mean_dev) +
         "," + fmt(s.ls_min_dev) + "," + fmt(s.ls_mean_comp) + "," + fmt(s.alg_runtime_s) + "," + fmt(s.total_runtime_s) +
         "\n";
}

std::string harvest_csv_header() {
  return "state,li,uc,nf,additional_mean,additional_mean_dev,additional_mean_comp,runtime_per_plan_s,total_runtime_s\n";
}

std::string harvest_csv_row(const std::string& state, const RunConfig& config, const EnsembleSummary& s) {
  return csv_prefix(state, config) + "," + fmt(s.additional_mean) + "," + fmt(s.additional_mean_dev) + "," +
         fmt(s.additional_mean_comp) + "," + fmt(s.additional_runtime_per_plan_s) + "," + fmt(s.harvest_total_runtime_s) +
         "\n";
}

}  // namespace redistrict
