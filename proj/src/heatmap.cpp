#include "dronehaul/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dronehaul {

namespace {

std::size_t cell_count(double extent, double cell)
{
  return static_cast<std::size_t>(std::ceil(extent / cell - 1e-9));
}

}  // namespace

std::size_t GridSpec::cols() const { return cell_count(width_m, cell_m); }
std::size_t GridSpec::rows() const { return cell_count(height_m, cell_m); }

Point GridSpec::center(std::size_t col, std::size_t row) const
{
  return {origin.x + (static_cast<double>(col) + 0.5) * cell_m, origin.y + (static_cast<double>(row) + 0.5) * cell_m};
}

void validate_grid(const GridSpec& spec)
{
  if (!(spec.cell_m > 0) || !std::isfinite(spec.cell_m)) throw std::invalid_argument("grid cell size must be > 0");
  if (!(spec.width_m >= spec.cell_m) || !(spec.height_m >= spec.cell_m)) {
    throw std::invalid_argument("grid width and height must be at least one cell");
  }
  if (!std::isfinite(spec.origin.x) || !std::isfinite(spec.origin.y) || !std::isfinite(spec.width_m) ||
      !std::isfinite(spec.height_m)) {
    throw std::invalid_argument("grid parameters must be finite");
  }
}

std::size_t CoverageGrid::covered_count() const
{
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const CellRecord& c) { return c.covered; }));
}

CoverageGrid evaluate_grid(const BackhaulPlanner& planner, const GridSpec& spec, unsigned threads)
{
  validate_grid(spec);
  CoverageGrid g{spec, {}};
  const std::size_t cols = spec.cols();
  const std::size_t rows = spec.rows();
  g.cells.resize(cols * rows);

  auto run_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < rows; r += stride) {
      for (std::size_t c = 0; c < cols; ++c) {
        const CoverageRecord rec = planner.evaluate(spec.center(c, r));
        g.cells[r * cols + c] = {rec.in_building, rec.covered, rec.drone_count, rec.bottleneck_bps};
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows)));
  if (threads == 1) {
    run_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run_rows, t, threads);
  }
  return g;
}

CoverageGrid evaluate_grid(const Scenario& s, const GridSpec& spec, unsigned threads)
{
  validate_grid(spec);
  const BackhaulPlanner planner(s);
  return evaluate_grid(planner, spec, threads);
}

ExportFormat parse_format(std::string_view name)
{
  if (name == "csv") return ExportFormat::csv;
  if (name == "pgm") return ExportFormat::pgm;
  throw std::invalid_argument("unsupported export format '" + std::string(name) + "'");
}

namespace {

std::string fmt6(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class PixelFn>
std::string pgm(const CoverageGrid& g, int maxval, PixelFn pixel)
{
  const std::size_t cols = g.spec.cols();
  const std::size_t rows = g.spec.rows();
  std::ostringstream out;
  out << "P2\n" << cols << ' ' << rows << '\n' << maxval << '\n';
  for (std::size_t r = rows; r-- > 0;) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ' ';
      out << pixel(g.at(c, r));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string export_grid(const CoverageGrid& g, ExportFormat format)
{
  if (format == ExportFormat::csv) {
    std::string out = "x,y,covered,hops,bottleneck_mbps\n";
    for (std::size_t r = 0; r < g.spec.rows(); ++r) {
      for (std::size_t c = 0; c < g.spec.cols(); ++c) {
        const CellRecord& cell = g.at(c, r);
        const Point p = g.spec.center(c, r);
        out += fmt6(p.x) + "," + fmt6(p.y) + "," + (cell.covered ? "1" : "0") + "," +
               std::to_string(cell.covered ? cell.drone_count : 0) + "," +
               fmt6(cell.covered ? cell.bottleneck_bps / 1e6 : 0.0) + "\n";
      }
    }
    return out;
  }

  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const CellRecord& c : g.cells) {
    if (!c.covered) continue;
    lo = any ? std::min(lo, c.bottleneck_bps) : c.bottleneck_bps;
    hi = any ? std::max(hi, c.bottleneck_bps) : c.bottleneck_bps;
    any = true;
  }
  return pgm(g, 255, [&](const CellRecord& c) -> int {
    if (!c.covered) return 0;
    if (hi <= lo) return 255;
    return 1 + static_cast<int>(std::lround(254.0 * (c.bottleneck_bps - lo) / (hi - lo)));
  });
}

std::string export_hops(const CoverageGrid& g, ExportFormat format)
{
  if (format == ExportFormat::csv) {
    std::string out = "x,y,covered,hops\n";
    for (std::size_t r = 0; r < g.spec.rows(); ++r) {
      for (std::size_t c = 0; c < g.spec.cols(); ++c) {
        const CellRecord& cell = g.at(c, r);
        const Point p = g.spec.center(c, r);
        out += fmt6(p.x) + "," + fmt6(p.y) + "," + (cell.covered ? "1" : "0") + "," +
               std::to_string(cell.covered ? cell.drone_count : 0) + "\n";
      }
    }
    return out;
  }
  int maxhops = 1;
  for (const CellRecord& c : g.cells) {
    if (c.covered) maxhops = std::max(maxhops, c.drone_count);
  }
  return pgm(g, maxhops, [](const CellRecord& c) { return c.covered ? c.drone_count : 0; });
}

std::vector<CellRecord> parse_grid_csv(std::string_view csv)
{
  std::vector<CellRecord> cells;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != "x,y,covered,hops,bottleneck_mbps") {
    throw std::invalid_argument("not a coverage csv");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string tok; std::getline(ls, tok, ',');) f.push_back(tok);
    if (f.size() != 5) throw std::invalid_argument("malformed csv row: " + line);
    CellRecord c;
    c.covered = f[2] == "1";
    c.drone_count = std::stoi(f[3]);
    c.bottleneck_bps = std::stod(f[4]) * 1e6;
    cells.push_back(c);
  }
  return cells;
}

}  // namespace dronehaul
