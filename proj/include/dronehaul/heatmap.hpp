#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dronehaul/planner.hpp"
#include "dronehaul/types.hpp"

namespace dronehaul {

/// Rectangular sweep area; origin is the south-west corner.
struct GridSpec {
  Point origin;
  double width_m = 0.0;
  double height_m = 0.0;
  double cell_m = 1.0;

  std::size_t cols() const;
  std::size_t rows() const;
  /// Center of cell (col, row); row 0 is the southernmost row.
  Point center(std::size_t col, std::size_t row) const;
};

/// Throws std::invalid_argument unless cell_m > 0 and both extents >= cell_m.
void validate_grid(const GridSpec& spec);

struct CellRecord {
  bool in_building = false;
  bool covered = false;
  int drone_count = 0;
  double bottleneck_bps = 0.0;

  friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

struct CoverageGrid {
  GridSpec spec;
  std::vector<CellRecord> cells;  // row-major, row 0 south

  const CellRecord& at(std::size_t col, std::size_t row) const { return cells[row * spec.cols() + col]; }
  std::size_t covered_count() const;
};

/// Plans a backhaul to every cell center. Cells are independent queries
/// against one shared planner; `threads` > 1 splits rows across workers and
/// yields the same grid as a serial run.
CoverageGrid evaluate_grid(const Scenario& s, const GridSpec& spec, unsigned threads = 1);
CoverageGrid evaluate_grid(const BackhaulPlanner& planner, const GridSpec& spec, unsigned threads = 1);

enum class ExportFormat { csv, pgm };

/// Throws std::invalid_argument for anything other than "csv" or "pgm".
ExportFormat parse_format(std::string_view name);

/// Throughput raster.
///   csv: header "x,y,covered,hops,bottleneck_mbps", one row per cell in
///        row-major order (south row first), numbers with 6 significant digits.
///   pgm: plain P2, north row first, maxval 255. Covered cells map linearly
///        from the grid's lowest covered throughput (1) to its highest (255);
///        uncovered and in-building cells are 0.
std::string export_grid(const CoverageGrid& g, ExportFormat format);

/// Hop-count raster.
///   csv: header "x,y,covered,hops", same cell order as export_grid.
///   pgm: plain P2, north row first, maxval = largest hop count (at least 1),
///        pixel = hop count, 0 when not covered.
std::string export_hops(const CoverageGrid& g, ExportFormat format);

/// Reads the covered/hops/bottleneck columns of an export_grid csv back.
std::vector<CellRecord> parse_grid_csv(std::string_view csv);

}  // namespace dronehaul
