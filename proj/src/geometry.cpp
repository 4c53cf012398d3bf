#include "dronehaul/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dronehaul {

int turn_sign(Point u, Point v)
{
  const double c = cross(u, v);
  const double scale = norm(u) * norm(v);
  if (std::abs(c) <= kOrientEps * scale) return 0;
  return c > 0 ? 1 : -1;
}

int orientation(Point a, Point b, Point c) { return turn_sign(b - a, c - a); }

bool segments_properly_intersect(const Segment& s1, const Segment& s2)
{
  const int o1 = orientation(s1.a, s1.b, s2.a);
  const int o2 = orientation(s1.a, s1.b, s2.b);
  const int o3 = orientation(s2.a, s2.b, s1.a);
  const int o4 = orientation(s2.a, s2.b, s1.b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

double point_segment_distance(Point p, const Segment& s)
{
  const Point d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

PolygonSide point_in_polygon(Point p, const Building& poly)
{
  const auto& ring = poly.footprint;
  const std::size_t n = ring.size();
  if (n < 3) return PolygonSide::outside;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = ring[j];
    const Point b = ring[i];
    if (point_segment_distance(p, {a, b}) <= kBoundaryEps) return PolygonSide::boundary;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside ? PolygonSide::inside : PolygonSide::outside;
}

bool outside_all(Point p, std::span<const Building> buildings)
{
  return std::all_of(buildings.begin(), buildings.end(), [&](const Building& b) {
    return point_in_polygon(p, b) == PolygonSide::outside;
  });
}

int containing_building(Point p, std::span<const Building> buildings)
{
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    if (point_in_polygon(p, buildings[i]) == PolygonSide::inside) return static_cast<int>(i);
  }
  return -1;
}

namespace {

bool blocks(Point p, Point q, const Building& b)
{
  const auto& ring = b.footprint;
  const std::size_t n = ring.size();
  const Segment pq{p, q};
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (segments_properly_intersect(pq, {ring[j], ring[i]})) return true;
  }

  // No proper crossing: the open segment can only reach the interior through
  // a vertex lying on it or from an endpoint sitting on the boundary. Split at
  // every vertex on the segment and test each piece's midpoint.
  const Point d = q - p;
  const double len2 = dot(d, d);
  std::vector<double> cuts{0.0, 1.0};
  for (const Point& v : ring) {
    if (orientation(p, q, v) != 0) continue;
    const double t = dot(v - p, d) / len2;
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] - cuts[k] <= 0.0) continue;
    const Point mid = p + (0.5 * (cuts[k] + cuts[k + 1])) * d;
    if (point_in_polygon(mid, b) == PolygonSide::inside) return true;
  }
  return false;
}

bool bbox_disjoint(Point p, Point q, const Building& b)
{
  double minx = b.footprint[0].x, maxx = minx, miny = b.footprint[0].y, maxy = miny;
  for (const Point& v : b.footprint) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  return std::max(p.x, q.x) < minx || std::min(p.x, q.x) > maxx ||
         std::max(p.y, q.y) < miny || std::min(p.y, q.y) > maxy;
}

}  // namespace

bool line_of_sight(Point p, Point q, std::span<const Building> buildings)
{
  if (p == q) return true;
  for (const Building& b : buildings) {
    if (b.footprint.size() < 3 || bbox_disjoint(p, q, b)) continue;
    if (blocks(p, q, b)) return false;
  }
  return true;
}

double signed_area(std::span<const Point> ring)
{
  double a = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) a += cross(ring[j], ring[i]);
  return 0.5 * a;
}

bool is_simple_polygon(std::span<const Point> ring)
{
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Segment e{ring[i], ring[(i + 1) % n]};
    for (std::size_t j = i + 1; j < n; ++j) {
      const Segment f{ring[j], ring[(j + 1) % n]};
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex: reject folds.
        const Point shared = (j == i + 1) ? e.b : e.a;
        const Point other_e = (j == i + 1) ? e.a : e.b;
        const Point other_f = (j == i + 1) ? f.b : f.a;
        if (orientation(shared, other_e, other_f) == 0 && dot(other_e - shared, other_f - shared) > 0) {
          return false;
        }
        continue;
      }
      if (segments_properly_intersect(e, f)) return false;
      if (point_segment_distance(e.a, f) <= kBoundaryEps || point_segment_distance(e.b, f) <= kBoundaryEps ||
          point_segment_distance(f.a, e) <= kBoundaryEps || point_segment_distance(f.b, e) <= kBoundaryEps) {
        return false;
      }
    }
  }
  return signed_area(ring) != 0.0;
}

CornerInflation inflate_corners(const Building& poly, double eps)
{
  CornerInflation out;
  const auto& ring = poly.footprint;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point u = ring[(i + n - 1) % n];
    const Point v = ring[i];
    const Point w = ring[(i + 1) % n];
    const Point t1 = (1.0 / distance(u, v)) * (v - u);
    const Point t2 = (1.0 / distance(v, w)) * (w - v);
    const double turn = cross(t1, t2);
    if (std::abs(turn) < 1e-9) {
      std::ostringstream msg;
      msg << "building " << poly.id << " vertex " << i << ": near-collinear corner skipped";
      out.warnings.push_back(msg.str());
      continue;
    }
    if (turn < 0) continue;  // reflex

    const Point n1{t1.y, -t1.x};
    const Point n2{t2.y, -t2.x};
    const double denom = 1.0 + dot(n1, n2);
    if (denom < 1e-6) {
      std::ostringstream msg;
      msg << "building " << poly.id << " vertex " << i << ": spike corner skipped";
      out.warnings.push_back(msg.str());
      continue;
    }
    const Point c = v + (eps / denom) * (n1 + n2);
    if (point_in_polygon(c, poly) != PolygonSide::outside) {
      std::ostringstream msg;
      msg << "building " << poly.id << " vertex " << i << ": offset corner falls on the footprint";
      out.warnings.push_back(msg.str());
      continue;
    }
    out.corners.push_back({i, c});
  }
  return out;
}

}  // namespace dronehaul
