#pragma once

#include <span>
#include <string>
#include <vector>

#include "dronehaul/types.hpp"

namespace dronehaul {

// Relative tolerance for orientation tests: a cross product whose magnitude
// is below kOrientEps * |u| * |v| counts as collinear.
inline constexpr double kOrientEps = 1e-12;
// Absolute distance under which a point is considered on a polygon boundary.
inline constexpr double kBoundaryEps = 1e-9;

/// Sign of the turn a->b->c: +1 counter-clockwise, -1 clockwise, 0 collinear.
int orientation(Point a, Point b, Point c);

/// Sign of cross(u, v) with the same relative tolerance as orientation().
int turn_sign(Point u, Point v);

/// True iff the segments share a single point interior to both. Shared
/// endpoints, T-junctions and collinear overlaps do not count.
bool segments_properly_intersect(const Segment& s1, const Segment& s2);

double point_segment_distance(Point p, const Segment& s);

enum class PolygonSide { inside, boundary, outside };

PolygonSide point_in_polygon(Point p, const Building& poly);

/// True when p is outside every footprint (boundary points excluded).
bool outside_all(Point p, std::span<const Building> buildings);

/// Index of the first building strictly containing p, or -1.
int containing_building(Point p, std::span<const Building> buildings);

/// Open segment (p, q) avoids every building interior. Grazing an edge or
/// touching a vertex does not block. Coincident endpoints are visible.
bool line_of_sight(Point p, Point q, std::span<const Building> buildings);

double signed_area(std::span<const Point> ring);

/// O(n^2) check for a simple polygon with at least three vertices.
bool is_simple_polygon(std::span<const Point> ring);

struct InflatedCorner {
  std::size_t vertex;  // index into the source footprint
  Point pos;
};

struct CornerInflation {
  std::vector<InflatedCorner> corners;
  std::vector<std::string> warnings;
};

/// Offsets every convex vertex outward to the corner of the polygon grown by
/// eps, i.e. eps / sin(theta / 2) along the exterior bisector. Reflex
/// vertices yield nothing; near-collinear or spike vertices are skipped with
/// a warning. Expects a counter-clockwise footprint.
CornerInflation inflate_corners(const Building& poly, double eps);

}  // namespace dronehaul
