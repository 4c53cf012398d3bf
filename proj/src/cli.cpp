#include "dronehaul/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dronehaul/geojson.hpp"
#include "dronehaul/geometry.hpp"
#include "dronehaul/heatmap.hpp"
#include "dronehaul/planner.hpp"
#include "dronehaul/scenario.hpp"
#include "dronehaul/visibility.hpp"

namespace dronehaul {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

struct Report {
  explicit Report(std::string cmd) : command(std::move(cmd)) {}

  std::string command;
  Clock::time_point start = Clock::now();
  std::size_t buildings = 0;
  std::size_t ris = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t vis_edges = 0;
  std::vector<std::string> warnings;

  void describe(const BackhaulPlanner& p)
  {
    buildings = p.scenario().buildings.size();
    ris = p.scenario().ris_panels.size();
    nodes = p.base_graph().nodes.size();
    edges = p.base_graph().edges.size();
    vis_edges = p.visibility_edge_count();
    warnings.insert(warnings.end(), p.base_graph().warnings.begin(), p.base_graph().warnings.end());
  }

  void emit(std::ostream& err) const
  {
    const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    nlohmann::json j = {{"command", command},
                        {"scenario",
                         {{"buildings", buildings},
                          {"ris", ris},
                          {"nodes", nodes},
                          {"edges", edges},
                          {"visibility_edges", vis_edges}}},
                        {"wall_ms", std::round(ms * 1000.0) / 1000.0},
                        {"warnings", warnings}};
    err << j.dump() << '\n';
  }
};

// Loads a scenario, mapping failures onto exit codes. Returns nullopt and
// sets `code` on failure.
std::optional<Scenario> load(const std::string& path, std::ostream& out, std::ostream& err, int& code)
{
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    code = kExitIo;
    return std::nullopt;
  }
  try {
    return load_scenario(text);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    code = kExitParse;
  } catch (const ValidationError& e) {
    for (const Issue& i : e.issues()) out << i.str() << '\n';
    code = kExitValidation;
  }
  return std::nullopt;
}

void apply_overrides(Scenario& s, bool use_ris, std::optional<int> n)
{
  if (!use_ris) s.ris_panels.clear();
  if (n) s.drone_budget_n = *n;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err)
{
  Report rep("validate");
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  LoadResult r;
  try {
    r = parse_scenario(text);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  }
  for (const Issue& i : r.issues) out << i.str() << '\n';
  if (!r.issues.empty()) return kExitValidation;
  rep.buildings = r.scenario.buildings.size();
  rep.ris = r.scenario.ris_panels.size();
  rep.emit(err);
  return kExitOk;
}

int cmd_plan(const std::string& path, Point target, bool use_ris, std::optional<int> n, std::ostream& out,
             std::ostream& err)
{
  Report rep("plan");
  int code = kExitOk;
  auto s = load(path, out, err, code);
  if (!s) return code;
  apply_overrides(*s, use_ris, n);
  if (!std::isfinite(target.x) || !std::isfinite(target.y)) {
    out << "target: non-finite coordinate\n";
    return kExitValidation;
  }
  bool bad_target = false;
  for (const Building& b : s->buildings) {
    const PolygonSide side = point_in_polygon(target, b);
    if (side == PolygonSide::inside) out << "target: inside building " << b.id << '\n';
    if (side == PolygonSide::boundary) out << "target: on the boundary of building " << b.id << '\n';
    bad_target |= side != PolygonSide::outside;
  }
  if (bad_target) return kExitValidation;

  const BackhaulPlanner planner(std::move(*s));
  rep.describe(planner);
  const CoverageRecord rec = planner.evaluate(target);
  out << format_path_record(rec) << '\n';
  rep.emit(err);
  return rec.covered ? kExitOk : kExitUnreachable;
}

GridSpec default_grid(const Scenario& s)
{
  double minx = s.mbs.x, maxx = s.mbs.x, miny = s.mbs.y, maxy = s.mbs.y;
  for (const Building& b : s.buildings) {
    for (const Point& p : b.footprint) {
      minx = std::min(minx, p.x);
      maxx = std::max(maxx, p.x);
      miny = std::min(miny, p.y);
      maxy = std::max(maxy, p.y);
    }
  }
  const double margin = std::max(10.0, 0.05 * std::max(maxx - minx, maxy - miny));
  GridSpec g{{minx - margin, miny - margin}, maxx - minx + 2 * margin, maxy - miny + 2 * margin, 1.0};
  g.cell_m = std::max(g.width_m, g.height_m) / 100.0;
  return g;
}

int cmd_heatmap(const std::string& path, const std::vector<double>& grid, const std::string& format_name,
                const std::string& out_dir, bool use_ris, std::optional<int> n, unsigned threads, std::ostream& out,
                std::ostream& err)
{
  Report rep("heatmap");
  int code = kExitOk;
  ExportFormat format;
  try {
    format = parse_format(format_name);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }
  auto s = load(path, out, err, code);
  if (!s) return code;
  apply_overrides(*s, use_ris, n);

  GridSpec spec = default_grid(*s);
  if (!grid.empty()) spec = {{grid[0], grid[1]}, grid[2], grid[3], grid[4]};
  try {
    validate_grid(spec);
  } catch (const std::invalid_argument& e) {
    out << "grid: " << e.what() << '\n';
    return kExitValidation;
  }

  const BackhaulPlanner planner(std::move(*s));
  rep.describe(planner);
  const CoverageGrid g = evaluate_grid(planner, spec, threads);

  const std::string ext = format == ExportFormat::csv ? ".csv" : ".pgm";
  try {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir);
    write_file(fs::path(out_dir) / ("throughput" + ext), export_grid(g, format));
    write_file(fs::path(out_dir) / ("hops" + ext), export_hops(g, format));
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  out << "cells=" << g.cells.size() << " covered=" << g.covered_count() << " cols=" << spec.cols()
      << " rows=" << spec.rows() << '\n';
  rep.emit(err);
  return kExitOk;
}

int cmd_visgraph(const std::string& path, const std::string& out_path, std::ostream& out, std::ostream& err)
{
  Report rep("visgraph");
  int code = kExitOk;
  auto s = load(path, out, err, code);
  if (!s) return code;
  std::vector<VisNode> nodes{{"MBS", s->mbs, NodeKind::mbs}};
  for (const BackhaulNode& c : candidate_sites(*s, &rep.warnings)) nodes.push_back({c.id, c.pos, c.kind});
  for (const RisPanel& p : s->ris_panels) nodes.push_back({"ris:" + p.id, p.mount, NodeKind::ris});
  const VisibilityGraph g = build_visibility_graph(std::move(nodes), s->buildings);
  rep.buildings = s->buildings.size();
  rep.ris = s->ris_panels.size();
  rep.nodes = g.nodes.size();
  rep.vis_edges = g.edges.size();
  const std::string text = g.edge_list();
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    try {
      write_file(out_path, text);
    } catch (const IoError& e) {
      err << "error: " << e.what() << '\n';
      return kExitIo;
    }
  }
  rep.emit(err);
  return kExitOk;
}

int cmd_convert(const std::string& in_path, const std::string& out_path, std::ostream& err)
{
  Report rep("convert-geojson");
  std::string text;
  try {
    text = read_file(in_path);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  GeoJsonConversion conv;
  try {
    conv = convert_geojson(text);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  }
  for (const std::string& w : conv.warnings) err << "warning: " << w << '\n';
  try {
    write_file(out_path, conv.document);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  rep.buildings = conv.building_count;
  rep.warnings = conv.warnings;
  rep.emit(err);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Multi-hop drone/RIS backhaul planner for 2D urban maps", "dronehaul"};
  app.require_subcommand(1);

  std::string scenario_path;
  bool use_ris = true;
  std::optional<int> n;

  auto* validate = app.add_subcommand("validate", "Load a scenario and list every violated invariant");
  validate->add_option("file", scenario_path, "Scenario JSON")->required();

  std::vector<double> target;
  auto* plan = app.add_subcommand("plan", "Plan the backhaul path to one AP target");
  plan->add_option("file", scenario_path, "Scenario JSON")->required();
  plan->add_option("--target", target, "AP target X Y (meters)")->expected(2)->required();
  plan->add_flag("--enable-ris,!--disable-ris", use_ris, "Use the scenario's RIS panels (default: on)");
  plan->add_option("--n", n, "Drone budget override (default: scenario n)");

  std::vector<double> grid;
  std::string format = "csv";
  std::string out_dir = ".";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  auto* heatmap = app.add_subcommand("heatmap", "Sweep a grid of AP targets and write throughput and hop rasters");
  heatmap->add_option("file", scenario_path, "Scenario JSON")->required();
  heatmap->add_option("--grid", grid,
                      "Origin X Y, width W, height H, cell size (meters); default: scenario bounding box plus "
                      "margin, 100 cells along the longer side")
      ->expected(5);
  heatmap->add_option("--format", format, "csv or pgm (default: csv)");
  heatmap->add_option("--out", out_dir, "Output directory (default: current directory)");
  heatmap->add_flag("--enable-ris,!--disable-ris", use_ris, "Use the scenario's RIS panels (default: on)");
  heatmap->add_option("--n", n, "Drone budget override (default: scenario n)");
  heatmap->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

  std::string out_path;
  auto* visgraph = app.add_subcommand("visgraph", "Print the visibility graph edge list (id_a id_b length_m)");
  visgraph->add_option("file", scenario_path, "Scenario JSON")->required();
  visgraph->add_option("--out", out_path, "Output file (default: standard output)");

  std::string in_path;
  std::string convert_out;
  auto* convert = app.add_subcommand("convert-geojson", "Convert a GeoJSON polygon collection to a scenario");
  convert->add_option("in", in_path, "GeoJSON FeatureCollection (WGS84)")->required();
  convert->add_option("out", convert_out, "Scenario JSON to write")->required();

  std::vector<const char*> argv{"dronehaul"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitParse;
  }

  if (n && *n < 0) {
    err << "error: --n must be >= 0\n";
    return kExitParse;
  }
  if (*validate) return cmd_validate(scenario_path, out, err);
  if (*plan) return cmd_plan(scenario_path, {target[0], target[1]}, use_ris, n, out, err);
  if (*heatmap) return cmd_heatmap(scenario_path, grid, format, out_dir, use_ris, n, threads, out, err);
  if (*visgraph) return cmd_visgraph(scenario_path, out_path, out, err);
  if (*convert) return cmd_convert(in_path, convert_out, err);
  return kExitParse;
}

}  // namespace dronehaul
