#include "dronehaul/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dronehaul/geometry.hpp"

namespace dronehaul {

const char* to_string(NodeKind k)
{
  switch (k) {
    case NodeKind::mbs: return "MBS";
    case NodeKind::drs_candidate: return "DRS_CANDIDATE";
    case NodeKind::ap_target: return "AP_TARGET";
    case NodeKind::ris: return "RIS";
  }
  return "?";
}

std::string VisibilityGraph::edge_list() const
{
  std::vector<std::string> lines;
  lines.reserve(edges.size());
  char buf[64];
  for (const VisEdge& e : edges) {
    const std::string* x = &nodes[e.a].id;
    const std::string* y = &nodes[e.b].id;
    if (*y < *x) std::swap(x, y);
    std::snprintf(buf, sizeof buf, " %.6f", e.length_m);
    lines.push_back(*x + " " + *y + buf);
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

namespace {

using Cone = ObstacleMap::Cone;

bool cone_contains(const Cone& c, Point d)
{
  if (c.half_plane) return turn_sign(c.e_out, d) > 0;
  const int s = turn_sign(c.e_out, c.e_in);
  if (s > 0) return turn_sign(c.e_out, d) > 0 && turn_sign(d, c.e_in) > 0;
  if (s < 0) return !(turn_sign(c.e_in, d) >= 0 && turn_sign(d, c.e_out) >= 0);
  return dot(c.e_out, c.e_in) < 0 && turn_sign(c.e_out, d) > 0;
}

bool any_cone_contains(const std::vector<Cone>& cones, Point d)
{
  return std::any_of(cones.begin(), cones.end(), [&](const Cone& c) { return cone_contains(c, d); });
}

Cone wedge_at(const std::vector<Point>& ring, std::size_t i)
{
  const std::size_t n = ring.size();
  return {ring[(i + 1) % n] - ring[i], ring[(i + n - 1) % n] - ring[i], false};
}

Cone half_plane_of(Point a, Point b) { return {b - a, a - b, true}; }

struct Box {
  double minx, miny, maxx, maxy;
  bool contains(Point p, double pad) const
  {
    return p.x >= minx - pad && p.x <= maxx + pad && p.y >= miny - pad && p.y <= maxy + pad;
  }
};

Box box_of(const std::vector<Point>& ring)
{
  Box b{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
  for (const Point& p : ring) {
    b.minx = std::min(b.minx, p.x);
    b.miny = std::min(b.miny, p.y);
    b.maxx = std::max(b.maxx, p.x);
    b.maxy = std::max(b.maxy, p.y);
  }
  return b;
}

bool boxes_overlap(Point a, Point b, Point c, Point d)
{
  return std::max(a.x, b.x) >= std::min(c.x, d.x) - kBoundaryEps &&
         std::max(c.x, d.x) >= std::min(a.x, b.x) - kBoundaryEps &&
         std::max(a.y, b.y) >= std::min(c.y, d.y) - kBoundaryEps &&
         std::max(c.y, d.y) >= std::min(a.y, b.y) - kBoundaryEps;
}

// Parameter of p projected on segment a-b, if p lies strictly inside it.
std::optional<double> interior_param(Point p, Point a, Point b)
{
  if (point_segment_distance(p, {a, b}) > kBoundaryEps) return std::nullopt;
  if (distance(p, a) <= kBoundaryEps || distance(p, b) <= kBoundaryEps) return std::nullopt;
  const Point d = b - a;
  return dot(p - a, d) / dot(d, d);
}

}  // namespace

ObstacleMap::ObstacleMap(std::span<const Building> buildings)
{
  for (const Building& b : buildings) {
    if (b.footprint.size() < 3) continue;
    Building copy = b;
    if (signed_area(copy.footprint) < 0) std::reverse(copy.footprint.begin(), copy.footprint.end());
    buildings_.push_back(std::move(copy));
  }

  std::map<std::pair<double, double>, std::uint32_t> index;
  // (building, feature) tags already recorded per point; feature = vertex or ~edge.
  std::vector<std::set<std::pair<std::size_t, std::ptrdiff_t>>> tags;
  auto intern = [&](Point p) {
    auto [it, fresh] = index.try_emplace({p.x, p.y}, static_cast<std::uint32_t>(points_.size()));
    if (fresh) {
      points_.push_back(p);
      point_cones_.emplace_back();
      tags.emplace_back();
    }
    return it->second;
  };
  auto add_cone = [&](std::uint32_t pt, std::size_t bld, std::ptrdiff_t feature, const Cone& c) {
    if (tags[pt].insert({bld, feature}).second) point_cones_[pt].push_back(c);
  };

  struct Edge {
    std::size_t bld;
    std::size_t k;
    Point a, b;
    std::vector<std::pair<double, std::uint32_t>> cuts;
  };
  std::vector<Edge> edges;
  for (std::size_t bi = 0; bi < buildings_.size(); ++bi) {
    const auto& ring = buildings_[bi].footprint;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const std::uint32_t v = intern(ring[k]);
      add_cone(v, bi, static_cast<std::ptrdiff_t>(k), wedge_at(ring, k));
      const Point a = ring[k];
      const Point b = ring[(k + 1) % ring.size()];
      edges.push_back({bi, k, a, b, {{0.0, v}}});
    }
  }
  for (Edge& e : edges) e.cuts.push_back({1.0, intern(e.b)});

  auto cut = [&](Edge& e, double t, std::uint32_t pt) {
    e.cuts.push_back({t, pt});
    add_cone(pt, e.bld, -1 - static_cast<std::ptrdiff_t>(e.k), half_plane_of(e.a, e.b));
  };

  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      Edge& e = edges[i];
      Edge& f = edges[j];
      if (e.bld == f.bld) continue;
      if (!boxes_overlap(e.a, e.b, f.a, f.b)) continue;
      if (segments_properly_intersect({e.a, e.b}, {f.a, f.b})) {
        const Point de = e.b - e.a;
        const Point df = f.b - f.a;
        const double t = cross(f.a - e.a, df) / cross(de, df);
        const Point x = e.a + t * de;
        const std::uint32_t pt = intern(x);
        cut(e, t, pt);
        cut(f, dot(x - f.a, df) / dot(df, df), pt);
        continue;
      }
      for (Point p : {f.a, f.b}) {
        if (auto t = interior_param(p, e.a, e.b)) cut(e, *t, intern(p));
      }
      for (Point p : {e.a, e.b}) {
        if (auto t = interior_param(p, f.a, f.b)) cut(f, *t, intern(p));
      }
    }
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (Edge& e : edges) {
    std::sort(e.cuts.begin(), e.cuts.end());
    for (std::size_t k = 0; k + 1 < e.cuts.size(); ++k) {
      const std::uint32_t p = e.cuts[k].second;
      const std::uint32_t q = e.cuts[k + 1].second;
      if (p == q) continue;
      if (seen.insert({std::min(p, q), std::max(p, q)}).second) pieces_.push_back({p, q});
    }
  }
  pieces_at_.assign(points_.size(), {});
  for (std::uint32_t i = 0; i < pieces_.size(); ++i) {
    pieces_at_[pieces_[i].p].push_back(i);
    pieces_at_[pieces_[i].q].push_back(i);
  }
}

std::vector<ObstacleMap::Cone> ObstacleMap::cones_at(Point p) const
{
  std::vector<Cone> out;
  for (const Building& b : buildings_) {
    const auto& ring = b.footprint;
    if (!box_of(ring).contains(p, kBoundaryEps)) continue;
    bool at_vertex = false;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      if (distance(p, ring[k]) <= kBoundaryEps) {
        out.push_back(wedge_at(ring, k));
        at_vertex = true;
        break;
      }
    }
    if (at_vertex) continue;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const Point a = ring[k];
      const Point c = ring[(k + 1) % ring.size()];
      if (point_segment_distance(p, {a, c}) <= kBoundaryEps) out.push_back(half_plane_of(a, c));
    }
  }
  return out;
}

namespace {

struct SweepItem {
  Point dir;
  double angle;
  double dist2;
  std::uint32_t ref;  // obstacle point index or target index
  bool target;
};

struct SweepState {
  Point origin;
  Point ray;
  std::size_t batch = 0;
  const std::vector<Point>* points;
  const std::vector<std::uint32_t>* batch_of;
  SweepStats* stats;
};

}  // namespace

std::vector<bool> ObstacleMap::visible(Point origin, std::span<const Point> targets, SweepStats* stats) const
{
  SweepStats local;
  SweepStats& st = stats ? *stats : local;
  std::vector<bool> result(targets.size(), false);

  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<SweepItem> items;
  items.reserve(points_.size() + targets.size());
  auto push = [&](Point p, std::uint32_t ref, bool is_target) {
    const Point d = p - origin;
    double ang = std::atan2(d.y, d.x);
    if (ang < 0) ang += 2.0 * std::numbers::pi;
    items.push_back({d, ang, dot(d, d), ref, is_target});
  };
  for (std::uint32_t i = 0; i < points_.size(); ++i) {
    if (distance(points_[i], origin) > kBoundaryEps) push(points_[i], i, false);
  }
  for (std::uint32_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == origin) {
      result[i] = true;
      continue;
    }
    push(targets[i], i, true);
  }
  st.events += items.size();
  if (items.empty()) return result;

  std::sort(items.begin(), items.end(), [](const SweepItem& a, const SweepItem& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.dist2 < b.dist2;
  });

  // Group items lying on the same ray from the origin.
  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i + 1;
    while (j < items.size() && turn_sign(items[i].dir, items[j].dir) == 0 && dot(items[i].dir, items[j].dir) > 0) ++j;
    batches.push_back({i, j});
    i = j;
  }
  std::vector<std::vector<std::size_t>> members(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    for (std::size_t i = batches[b].first; i < batches[b].second; ++i) members[b].push_back(i);
  }
  if (batches.size() > 1) {
    const Point first = items[batches.front().first].dir;
    const Point last = items[batches.back().first].dir;
    if (turn_sign(first, last) == 0 && dot(first, last) > 0) {
      members.front().insert(members.front().end(), members.back().begin(), members.back().end());
      members.pop_back();
    }
  }
  for (auto& m : members) {
    std::sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      if (items[a].dist2 != items[b].dist2) return items[a].dist2 < items[b].dist2;
      return items[a].target && !items[b].target;
    });
  }
  const std::size_t nbatch = members.size();

  std::vector<std::uint32_t> batch_of(points_.size(), kNone);
  for (std::size_t b = 0; b < nbatch; ++b) {
    for (std::size_t i : members[b]) {
      if (!items[i].target) batch_of[items[i].ref] = static_cast<std::uint32_t>(b);
    }
  }

  SweepState state{origin, items[members[0][0]].dir, 0, &points_, &batch_of, &st};
  auto param = [&state](const Piece& pc) {
    const Point a = (*state.points)[pc.p];
    const Point b = (*state.points)[pc.q];
    return cross(a - state.origin, b - a) / cross(state.ray, b - a);
  };
  auto closer = [&](std::uint32_t x, std::uint32_t y) {
    ++st.comparisons;
    if (x == y) return false;
    const Piece& px = pieces_[x];
    const Piece& py = pieces_[y];
    std::uint32_t shared = kNone;
    if (px.p == py.p || px.p == py.q) shared = px.p;
    if (px.q == py.p || px.q == py.q) shared = px.q;
    if (shared != kNone && batch_of[shared] == state.batch) {
      // Both pieces start at the same point of the current ray: the nearer
      // one is the one on the origin's side of the other.
      const Point c = points_[shared];
      const Point ox = points_[px.p == shared ? px.q : px.p];
      const Point oy = points_[py.p == shared ? py.q : py.p];
      const int sx = orientation(c, oy, ox);
      if (sx == 0) return x < y;
      return sx == orientation(c, oy, origin);
    }
    const double tx = param(px);
    const double ty = param(py);
    if (tx != ty) return tx < ty;
    return x < y;
  };
  using Status = std::set<std::uint32_t, decltype(closer)>;
  Status status(closer);
  std::vector<std::optional<Status::iterator>> handle(pieces_.size());

  std::vector<std::vector<std::uint32_t>> inserts(nbatch), removals(nbatch);
  std::vector<std::uint32_t> initial;
  for (std::uint32_t i = 0; i < pieces_.size(); ++i) {
    const Piece& pc = pieces_[i];
    const std::uint32_t bp = batch_of[pc.p];
    const std::uint32_t bq = batch_of[pc.q];
    if (bp == kNone || bq == kNone || bp == bq) continue;
    // A piece through the origin only matters via the origin cones; cut
    // points are rounded, so its orientation test alone is unreliable.
    if (point_segment_distance(origin, {points_[pc.p], points_[pc.q]}) <= kBoundaryEps) continue;
    const int o = orientation(origin, points_[pc.p], points_[pc.q]);
    if (o == 0) continue;
    const std::uint32_t bs = o > 0 ? bp : bq;
    const std::uint32_t be = o > 0 ? bq : bp;
    inserts[bs].push_back(i);
    removals[be].push_back(i);
    if (bs > be && be > 0) initial.push_back(i);
  }
  for (std::uint32_t i : initial) {
    handle[i] = status.insert(i).first;
    ++st.status_ops;
  }

  const std::vector<Cone> origin_cones = cones_at(origin);

  for (std::size_t b = 0; b < nbatch; ++b) {
    state.batch = b;
    state.ray = items[members[b][0]].dir;

    for (std::uint32_t i : removals[b]) {
      if (handle[i]) {
        status.erase(*handle[i]);
        handle[i].reset();
        ++st.status_ops;
      }
    }

    const bool origin_blocked = any_cone_contains(origin_cones, state.ray);
    bool passed_interior = false;
    for (std::size_t idx : members[b]) {
      const SweepItem& it = items[idx];
      if (!it.target) {
        const auto& cones = point_cones_[it.ref];
        if (any_cone_contains(cones, it.dir) || any_cone_contains(cones, -1.0 * it.dir)) passed_interior = true;
        continue;
      }
      const Point w = targets[it.ref];
      if (origin_blocked || passed_interior) continue;
      if (any_cone_contains(cones_at(w), -1.0 * it.dir)) continue;

      const double reach = dot(it.dir, state.ray) / dot(state.ray, state.ray);
      bool blocked = false;
      ++st.status_ops;
      for (auto s = status.begin(); s != status.end(); ++s) {
        if (param(pieces_[*s]) >= reach * (1.0 + 1e-9)) break;
        const Segment piece{points_[pieces_[*s].p], points_[pieces_[*s].q]};
        if (point_segment_distance(w, piece) <= kBoundaryEps) continue;
        if (segments_properly_intersect({origin, w}, piece)) {
          blocked = true;
          break;
        }
      }
      result[it.ref] = !blocked;
    }

    for (std::uint32_t i : inserts[b]) {
      handle[i] = status.insert(i).first;
      ++st.status_ops;
    }
  }
  return result;
}

std::vector<std::string> visible_from(const VisNode& origin, std::span<const VisNode> others,
                                      std::span<const Building> buildings, SweepStats* stats)
{
  const ObstacleMap obstacles(buildings);
  std::vector<Point> pts;
  pts.reserve(others.size());
  for (const VisNode& n : others) pts.push_back(n.pos);
  const std::vector<bool> vis = obstacles.visible(origin.pos, pts, stats);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (vis[i] && others[i].id != origin.id) ids.push_back(others[i].id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

void require_unique_ids(const std::vector<VisNode>& nodes)
{
  std::set<std::string> ids;
  for (const VisNode& n : nodes) {
    if (!ids.insert(n.id).second) throw std::invalid_argument("duplicate node id " + n.id);
  }
}

}  // namespace

VisibilityGraph build_visibility_graph(std::vector<VisNode> nodes, const ObstacleMap& obstacles)
{
  require_unique_ids(nodes);
  VisibilityGraph g;
  g.nodes = std::move(nodes);
  std::vector<Point> pts;
  for (const VisNode& n : g.nodes) pts.push_back(n.pos);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const std::span<const Point> rest(pts.begin() + static_cast<std::ptrdiff_t>(i + 1), pts.end());
    const std::vector<bool> vis = obstacles.visible(pts[i], rest);
    for (std::size_t k = 0; k < rest.size(); ++k) {
      if (vis[k]) g.edges.push_back({i, i + 1 + k, distance(pts[i], rest[k])});
    }
  }
  return g;
}

VisibilityGraph build_visibility_graph(std::vector<VisNode> nodes, std::span<const Building> buildings)
{
  return build_visibility_graph(std::move(nodes), ObstacleMap(buildings));
}

VisibilityGraph visibility_oracle(std::vector<VisNode> nodes, std::span<const Building> buildings)
{
  require_unique_ids(nodes);
  VisibilityGraph g;
  g.nodes = std::move(nodes);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      if (line_of_sight(g.nodes[i].pos, g.nodes[j].pos, buildings)) {
        g.edges.push_back({i, j, distance(g.nodes[i].pos, g.nodes[j].pos)});
      }
    }
  }
  return g;
}

}  // namespace dronehaul
