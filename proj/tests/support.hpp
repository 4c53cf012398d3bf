#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dronehaul/geometry.hpp"
#include "dronehaul/scenario.hpp"
#include "dronehaul/types.hpp"
#include "dronehaul/visibility.hpp"

namespace testsupport {

using namespace dronehaul;
using Rng = std::mt19937_64;

inline std::string fixture(const std::string& name) { return std::string(DRONEHAUL_FIXTURE_DIR) + "/" + name; }

inline std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Building rect(std::string id, double x0, double y0, double x1, double y1)
{
  return {std::move(id), {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

// Star-shaped polygon around c, counter-clockwise. With snap set, vertices
// are rounded to integers and the polygon is redrawn until it stays simple.
inline Building star_polygon(Rng& rng, std::string id, Point c, double radius, int nverts, bool snap)
{
  for (;;) {
    std::vector<double> angles(static_cast<std::size_t>(nverts));
    for (double& a : angles) a = uniform(rng, 0.0, 2 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    std::vector<Point> ring;
    for (double a : angles) {
      const double r = uniform(rng, 0.35 * radius, radius);
      Point p{c.x + r * std::cos(a), c.y + r * std::sin(a)};
      if (snap) p = {std::round(p.x), std::round(p.y)};
      if (ring.empty() || !(ring.back() == p)) ring.push_back(p);
    }
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    if (ring.size() < 3 || !is_simple_polygon(ring) || signed_area(ring) <= 1e-6) continue;
    return {std::move(id), std::move(ring)};
  }
}

enum class MapStyle { scattered, snapped, blocks };

// Obstacle sets for visibility tests. `scattered` polygons may overlap,
// `snapped` ones sit on an integer lattice and produce many collinear
// vertices, `blocks` are axis-aligned rectangles on a lattice that often share
// walls or corners.
inline std::vector<Building> random_obstacles(Rng& rng, int count, double extent, MapStyle style)
{
  std::vector<Building> out;
  for (int i = 0; i < count; ++i) {
    const std::string id = "b" + std::to_string(i);
    if (style == MapStyle::blocks) {
      const double x = uniform_int(rng, 0, 9) * extent / 10;
      const double y = uniform_int(rng, 0, 9) * extent / 10;
      const double w = uniform_int(rng, 1, 2) * extent / 10;
      const double h = uniform_int(rng, 1, 2) * extent / 10;
      out.push_back(rect(id, x, y, x + w, y + h));
      continue;
    }
    const Point c{uniform(rng, 0, extent), uniform(rng, 0, extent)};
    const double r = uniform(rng, 0.03, 0.12) * extent;
    out.push_back(star_polygon(rng, id, c, r, uniform_int(rng, 3, 8), style == MapStyle::snapped));
  }
  return out;
}

// Nodes outside every building interior. Part of them sit exactly on
// footprint vertices and edges to exercise grazing rays.
inline std::vector<VisNode> random_nodes(Rng& rng, int count, const std::vector<Building>& buildings, double extent,
                                         bool snap)
{
  std::vector<VisNode> nodes;
  std::set<std::pair<double, double>> used;
  auto add = [&](Point p) {
    if (containing_building(p, buildings) >= 0) return;
    if (!used.insert({p.x, p.y}).second) return;
    nodes.push_back({"n" + std::to_string(nodes.size()), p, NodeKind::drs_candidate});
  };
  int guard = 0;
  while (static_cast<int>(nodes.size()) < count && ++guard < 100 * count) {
    const int mode = buildings.empty() ? 0 : uniform_int(rng, 0, 3);
    if (mode <= 1) {
      Point p{uniform(rng, -0.1 * extent, 1.1 * extent), uniform(rng, -0.1 * extent, 1.1 * extent)};
      if (snap) p = {std::round(p.x), std::round(p.y)};
      add(p);
      continue;
    }
    const Building& b = buildings[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(buildings.size()) - 1))];
    const std::size_t k = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(b.footprint.size()) - 1));
    const Point a = b.footprint[k];
    const Point c = b.footprint[(k + 1) % b.footprint.size()];
    add(mode == 2 ? a : 0.5 * (a + c));
  }
  return nodes;
}

inline Point outward_normal_of(const Building& b, std::size_t edge)
{
  const Point a = b.footprint[edge];
  const Point c = b.footprint[(edge + 1) % b.footprint.size()];
  const Point d = c - a;
  return (1.0 / norm(d)) * Point{d.y, -d.x};
}

// City-like map: one rectangle or L-shape per block of a `blocks` x `blocks`
// lattice with streets in between, MBS at a street crossing, and `panels`
// RIS panels on random outer walls.
inline Scenario random_urban(Rng& rng, int blocks, int panels, int n = 3)
{
  const double pitch = 60.0;
  Scenario s;
  for (int i = 0; i < blocks; ++i) {
    for (int j = 0; j < blocks; ++j) {
      if (uniform(rng, 0, 1) < 0.2) continue;
      const double x0 = i * pitch + uniform(rng, 8, 16);
      const double y0 = j * pitch + uniform(rng, 8, 16);
      const double x1 = (i + 1) * pitch - uniform(rng, 8, 16);
      const double y1 = (j + 1) * pitch - uniform(rng, 8, 16);
      const std::string id = "B" + std::to_string(i) + "_" + std::to_string(j);
      if (uniform(rng, 0, 1) < 0.3) {
        const double xm = uniform(rng, x0 + 8, x1 - 8);
        const double ym = uniform(rng, y0 + 8, y1 - 8);
        s.buildings.push_back({id, {{x0, y0}, {x1, y0}, {x1, ym}, {xm, ym}, {xm, y1}, {x0, y1}}});
      } else {
        s.buildings.push_back(rect(id, x0, y0, x1, y1));
      }
    }
  }
  s.mbs = {uniform_int(rng, 0, blocks) * pitch, uniform_int(rng, 0, blocks) * pitch};
  s.drone_budget_n = n;
  for (int k = 0; k < panels && !s.buildings.empty(); ++k) {
    const Building& b =
        s.buildings[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(s.buildings.size()) - 1))];
    const std::size_t e = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(b.footprint.size()) - 1));
    const Point a = b.footprint[e];
    const Point c = b.footprint[(e + 1) % b.footprint.size()];
    RisPanel p;
    p.id = "R" + std::to_string(k);
    p.wall = {a, c};
    p.mount = a + uniform(rng, 0.25, 0.75) * (c - a);
    p.outward_normal = outward_normal_of(b, e);
    s.ris_panels.push_back(p);
  }
  return s;
}

}  // namespace testsupport
