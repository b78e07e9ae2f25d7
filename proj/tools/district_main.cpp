// district: command-line driver for the redistricting engine.
//
//   district run       --pop p.csv --geo g.geojson --k 4 --seed 42 --out dir/
//   district ensemble  --graph adj.json --k 4 --runs 100 --jobs 4 --out dir/
//   district score     --pop p.csv --geo g.geojson --plan plan.json
//   district premerge  --pop p.csv --geo g.geojson --k 27 --out-pop m.csv --out-geo m.geojson

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "redistrict/ingest.hpp"
#include "redistrict/pipeline.hpp"
#include "redistrict/plan_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace redistrict;

namespace {

struct GraphArgs {
  std::string adjacency;
  std::string pop;
  std::string geo;
  int decimals = 7;
  double min_shared_length = 0.0;
  bool premerge = false;
};

void add_graph_options(CLI::App* cmd, GraphArgs& g) {
  auto* adj = cmd->add_option("--graph", g.adjacency, "Adjacency JSON (vertices + edges)");
  auto* pop = cmd->add_option("--pop", g.pop, "Population CSV (id,population[,county])");
  auto* geo = cmd->add_option("--geo", g.geo, "GeoJSON FeatureCollection keyed by the id property");
  pop->needs(geo);
  geo->needs(pop);
  adj->excludes(pop)->excludes(geo);
  cmd->add_option("--decimals", g.decimals, "Coordinate rounding before segment matching")->capture_default_str();
  cmd->add_option("--min-shared-length", g.min_shared_length, "Shared border length must exceed this")
      ->capture_default_str();
  cmd->add_flag("--premerge", g.premerge, "Merge counties lighter than total/k into single units first");
}

struct Loaded {
  std::shared_ptr<const DualGraph> graph;
  Provenance provenance;
  std::string hash;
  double seconds = 0.0;
};

Loaded load(const GraphArgs& g, int k) {
  const auto t0 = std::chrono::steady_clock::now();
  Loaded out;
  if (!g.adjacency.empty()) {
    if (g.premerge) throw Error("--premerge needs --pop/--geo input");
    auto lg = load_adjacency_json(g.adjacency);
    out.graph = std::make_shared<const DualGraph>(std::move(lg.graph));
    out.provenance = std::move(lg.provenance);
  } else if (!g.pop.empty()) {
    LoadOptions opts;
    opts.adjacency.decimal_places = g.decimals;
    opts.adjacency.min_shared_length = g.min_shared_length;
    if (g.premerge) opts.premerge_k = k;
    auto lg = load_graph(g.pop, g.geo, opts);
    out.graph = std::make_shared<const DualGraph>(std::move(lg.graph));
    out.provenance = std::move(lg.provenance);
  } else {
    throw Error("no input: pass --graph or --pop with --geo");
  }
  out.hash = graph_hash(*out.graph);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

struct ConfigArgs {
  int k = 0;
  int mi = 100;
  int li = 750;
  std::string nf = "cmb";
  std::string uc = "1";
  std::uint64_t seed = 0;
  double dev_target = 1.0;
  double harvest_threshold = 5.0;
  bool refine_harvest = true;
  std::string tree = "broder";
  std::string medoid_rule = "branch";
  bool check = false;
};

void add_config_options(CLI::App* cmd, ConfigArgs& c) {
  cmd->add_option("--k", c.k, "Number of districts")->required();
  cmd->add_option("--mi", c.mi, "Maximum k-medoids iterations")->capture_default_str();
  cmd->add_option("--li", c.li, "Maximum local search iterations")->capture_default_str();
  cmd->add_option("--nf", c.nf, "Neighborhood: flip | swap | cmb")->capture_default_str();
  cmd->add_option("--uc", c.uc, "Uncoarsening schedule, e.g. 0.3,0.5,0.7,0.9,0.95,1")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Seed (master seed for ensembles)")->capture_default_str();
  cmd->add_option("--dev-target", c.dev_target, "Stop once Dev (%) falls below this")->capture_default_str();
  cmd->add_option("--harvest-threshold", c.harvest_threshold, "Keep k-medoids plans below this Dev (%)")
      ->capture_default_str();
  cmd->add_flag("--harvest,!--no-harvest", c.refine_harvest, "Refine and write harvested plans (default on)");
  cmd->add_option("--tree", c.tree, "Spanning tree sampler: broder | wilson")->capture_default_str();
  cmd->add_option("--medoid-rule", c.medoid_rule, "Medoid update: branch | path")->capture_default_str();
  cmd->add_flag("--check-invariants", c.check, "Validate every intermediate plan");
}

RunConfig to_config(const ConfigArgs& a) {
  RunConfig c;
  c.k = a.k;
  c.mi = a.mi;
  c.li = a.li;
  c.nf = parse_neighborhood(a.nf);
  c.uc = UncoarseningSchedule::parse(a.uc);
  c.seed = a.seed;
  c.dev_target = a.dev_target;
  c.harvest_threshold = a.harvest_threshold;
  c.refine_harvest = a.refine_harvest;
  c.sampler = parse_tree_sampler(a.tree);
  c.medoid_rule = parse_medoid_rule(a.medoid_rule);
  c.check_invariants = a.check;
  c.validate();
  return c;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json run_summary(const RunReport& r) {
  json harvest = json::array();
  for (const auto& h : r.harvest)
    harvest.push_back({{"dev_percent", h.metrics.dev_percent},
                       {"mean_compactness", optional_json(h.metrics.mean_compactness)},
                       {"ls_iterations", h.ls_iterations},
                       {"runtime_s", h.runtime_s}});
  return {{"seed", r.seed},
          {"coarse_vertices", r.coarse_vertices},
          {"coarsen_stopped_early", r.coarsen_stopped_early},
          {"kmedoids_iterations", r.kmedoids_iterations},
          {"kmedoids_dev_percent", r.kmedoids_metrics.dev_percent},
          {"kmedoids_mean_compactness", optional_json(r.kmedoids_metrics.mean_compactness)},
          {"dev_percent", r.final.metrics.dev_percent},
          {"mean_compactness", optional_json(r.final.metrics.mean_compactness)},
          {"ls_iterations", r.final.ls_iterations},
          {"additional_plans", r.additional_plans},
          {"harvest", harvest},
          {"timings_s",
           {{"coarsen", r.coarsen_s},
            {"kmedoids", r.kmedoids_s},
            {"local_search", r.local_search_s},
            {"algorithm", r.algorithm_s},
            {"evaluate", r.evaluate_s},
            {"harvest", r.harvest_s}}},
          {"invariant_checks", r.invariant_checks},
          {"invariant_violations", r.invariant_violations},
          {"warnings", r.warnings}};
}

json provenance_json(const Loaded& l) {
  json files = json::array();
  for (const auto& [path, sha] : l.provenance.files) files.push_back({{"path", path}, {"sha256", sha}});
  return {{"graph_hash", l.hash}, {"files", files}, {"vertices", l.graph->vertex_count()}, {"edges", l.graph->edge_count()}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string run_tag(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03zu", i);
  return buf;
}

void write_run_plans(const fs::path& dir, const std::string& tag, const Loaded& l, const RunReport& r,
                     const RunConfig& config) {
  write_plan(dir / (tag + ".json"), plan_json(*l.graph, l.hash, r.final.plan, r.final.metrics, config, r.seed));
  for (std::size_t h = 0; h < r.harvest.size(); ++h) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_h%02zu", h + 1);
    write_plan(dir / (tag + suffix + ".json"),
               plan_json(*l.graph, l.hash, r.harvest[h].plan, r.harvest[h].metrics, config, r.seed));
  }
}

void print_warnings(const RunReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (r.invariant_violations) std::cerr << "error: " << r.invariant_violations << " invariant violations\n";
}

int cmd_run(const GraphArgs& g, const ConfigArgs& a, const std::string& out) {
  const RunConfig config = to_config(a);
  const Loaded l = load(g, config.k);
  const RunReport r = run_once(l.graph, config);
  print_warnings(r);
  fs::create_directories(out);
  const fs::path dir(out);
  write_plan(dir / "plan.json", plan_json(*l.graph, l.hash, r.final.plan, r.final.metrics, config, r.seed));
  for (std::size_t h = 0; h < r.harvest.size(); ++h) {
    char name[32];
    std::snprintf(name, sizeof name, "harvest_%02zu.json", h + 1);
    write_plan(dir / name, plan_json(*l.graph, l.hash, r.harvest[h].plan, r.harvest[h].metrics, config, r.seed));
  }
  json report = run_summary(r);
  report["provenance"] = provenance_json(l);
  report["ingest_s"] = l.seconds;
  write_text(dir / "report.json", report.dump(2) + "\n");
  std::printf("dev %.6f%%  compactness %s  k-medoids dev %.6f%%  additional plans %zu\n", r.final.metrics.dev_percent,
              r.final.metrics.mean_compactness ? std::to_string(*r.final.metrics.mean_compactness).c_str() : "n/a",
              r.kmedoids_metrics.dev_percent, r.additional_plans);
  return r.invariant_violations ? 3 : 0;
}

int cmd_ensemble(const GraphArgs& g, const ConfigArgs& a, const std::string& out, std::size_t runs, std::size_t jobs,
                 const std::string& state) {
  const RunConfig config = to_config(a);
  const Loaded l = load(g, config.k);
  const auto reports = run_ensemble(l.graph, config, runs, jobs);

  const fs::path dir(out);
  fs::create_directories(dir / "plans");
  std::size_t violations = 0;
  json per_run = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    print_warnings(reports[i]);
    violations += reports[i].invariant_violations;
    write_run_plans(dir / "plans", run_tag(i), l, reports[i], config);
    per_run.push_back(run_summary(reports[i]));
  }
  const EnsembleSummary s = summarize(reports, l.seconds);
  write_text(dir / "summary.csv", summary_csv_header() + summary_csv_row(state, config, s));
  write_text(dir / "harvest_summary.csv", harvest_csv_header() + harvest_csv_row(state, config, s));
  json report{{"runs", per_run}, {"provenance", provenance_json(l)}, {"ingest_s", l.seconds}, {"master_seed", config.seed}};
  write_text(dir / "report.json", report.dump(2) + "\n");

  std::cout << summary_csv_header() << summary_csv_row(state, config, s) << harvest_csv_header()
            << harvest_csv_row(state, config, s);
  return violations ? 3 : 0;
}

int cmd_score(const GraphArgs& g, const std::string& plan_path, bool strict) {
  const Loaded l = load(g, 1);
  PlanFile pf = read_plan(plan_path, *l.graph, strict);
  for (const auto& w : pf.warnings) std::cerr << "warning: " << w << "\n";
  const PlanMetrics m = evaluate(*l.graph, pf.plan);
  json out = json::parse(metrics_json(m));
  out["contiguous"] = all_districts_contiguous(*l.graph, pf.plan);
  out["graph_hash"] = l.hash;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_premerge(const std::string& pop, const std::string& geo, int k, const std::string& out_pop,
                 const std::string& out_geo, const std::string& out_graph, const AdjacencyOptions& adj) {
  auto units = read_population_csv(pop);
  auto shapes = read_geometry_geojson(geo);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < units.size(); ++i) index.emplace(units[i].id, i);
  for (auto& s : shapes) {
    auto it = index.find(s.id);
    if (it == index.end()) throw ParseError(geo + ": id '" + s.id + "' not in " + pop);
    units[it->second].polygons = std::move(s.polygons);
    units[it->second].holes = std::move(s.holes);
  }
  std::size_t counties = 0;
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& u : units) seen[u.county] = 1;
    counties = seen.size();
  }
  const auto merged = county_premerge(units, k);
  std::size_t intact = 0;
  {
    std::unordered_map<std::string, int> per_county;
    for (const auto& u : merged) ++per_county[u.county];
    for (const auto& [c, n] : per_county) intact += n == 1;
  }
  if (!out_pop.empty()) write_population_csv(out_pop, merged);
  if (!out_geo.empty()) write_geometry_geojson(out_geo, merged);
  if (!out_graph.empty()) {
    auto edges = rook_adjacency(merged, adj);
    write_adjacency_json(out_graph, build_graph(merged, std::move(edges)));
  }
  std::printf("%zu units -> %zu units; %zu of %zu counties intact\n", units.size(), merged.size(), intact, counties);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Districting plans by k-medoids growth, coarsening and tabu local search"};
  app.require_subcommand(1);

  GraphArgs run_graph, ens_graph, score_graph;
  ConfigArgs run_cfg, ens_cfg;
  std::string run_out = "out", ens_out = "out", state = "XX", plan_path;
  std::size_t runs = 100, jobs = 1;
  bool strict = false;

  auto* run = app.add_subcommand("run", "One seeded run");
  add_graph_options(run, run_graph);
  add_config_options(run, run_cfg);
  run->add_option("--out", run_out, "Output directory")->capture_default_str();

  auto* ens = app.add_subcommand("ensemble", "Many runs with derived seeds, plus summary CSVs");
  add_graph_options(ens, ens_graph);
  add_config_options(ens, ens_cfg);
  ens->add_option("--out", ens_out, "Output directory")->capture_default_str();
  ens->add_option("--runs", runs, "Number of runs")->capture_default_str()->check(CLI::PositiveNumber);
  ens->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  ens->add_option("--state", state, "Label for the state column of the summary")->capture_default_str();

  auto* score = app.add_subcommand("score", "Metrics for an existing plan");
  add_graph_options(score, score_graph);
  score->add_option("--plan", plan_path, "Plan JSON")->required();
  score->add_flag("--strict", strict, "Fail when the plan's graph hash differs");

  std::string pm_pop, pm_geo, pm_out_pop, pm_out_geo, pm_out_graph;
  int pm_k = 0;
  AdjacencyOptions pm_adj;
  auto* pm = app.add_subcommand("premerge", "Merge light counties into single units");
  pm->add_option("--pop", pm_pop, "Population CSV with a county column")->required();
  pm->add_option("--geo", pm_geo, "GeoJSON geometry")->required();
  pm->add_option("--k", pm_k, "Number of districts (sets the total/k threshold)")->required();
  pm->add_option("--out-pop", pm_out_pop, "Merged population CSV");
  pm->add_option("--out-geo", pm_out_geo, "Merged GeoJSON");
  pm->add_option("--out-graph", pm_out_graph, "Merged adjacency JSON");
  pm->add_option("--decimals", pm_adj.decimal_places, "Coordinate rounding for --out-graph")->capture_default_str();
  pm->add_option("--min-shared-length", pm_adj.min_shared_length, "Border length threshold for --out-graph")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_graph, run_cfg, run_out);
    if (ens->parsed()) return cmd_ensemble(ens_graph, ens_cfg, ens_out, runs, jobs, state);
    if (score->parsed()) return cmd_score(score_graph, plan_path, strict);
    if (pm->parsed()) return cmd_premerge(pm_pop, pm_geo, pm_k, pm_out_pop, pm_out_geo, pm_out_graph, pm_adj);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
