#include "dronehaul/planner.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "dronehaul/geometry.hpp"

namespace dronehaul {

namespace {

// Endpoints on the wall line itself are outside the open half-plane.
constexpr double kHalfPlaneEps = 1e-9;

bool in_front_of(const RisPanel& p, Point x) { return dot(x - p.mount, p.outward_normal) > kHalfPlaneEps; }

const std::string kMbsId = "MBS";

struct Assembly {
  BackhaulGraph graph;
  std::vector<std::vector<std::size_t>> panel_members;  // nodes serviceable by each panel
  std::size_t vis_edges = 0;
};

// Adds every feasible direct and reflected hop between the given nodes.
Assembly connect(const Scenario& s, std::vector<BackhaulNode> nodes, const ObstacleMap& obstacles)
{
  Assembly out;
  BackhaulGraph& g = out.graph;
  g.nodes = std::move(nodes);
  g.panels = s.ris_panels;
  const RadioParams& radio = s.radio;

  std::vector<VisNode> vnodes;
  for (const BackhaulNode& n : g.nodes) vnodes.push_back({n.id, n.pos, n.kind});
  const VisibilityGraph vis = build_visibility_graph(std::move(vnodes), obstacles);
  out.vis_edges = vis.edges.size();

  for (const VisEdge& e : vis.edges) {
    if (e.length_m <= 0) continue;
    const HopBudget b = hop_budget(DirectHop{e.length_m}, radio);
    if (!b.feasible) continue;
    g.edges.push_back({e.a, e.b, DirectLink{e.length_m}, b, b.pl_db + radio.hop_penalty_db});
  }

  std::vector<Point> pts;
  for (const BackhaulNode& n : g.nodes) pts.push_back(n.pos);
  for (std::size_t r = 0; r < g.panels.size(); ++r) {
    const RisPanel& panel = g.panels[r];
    const std::vector<bool> seen = obstacles.visible(panel.mount, pts);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (seen[i] && in_front_of(panel, pts[i])) members.push_back(i);
    }
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        const std::size_t u = members[x];
        const std::size_t v = members[y];
        const double d1 = distance(pts[u], panel.mount);
        const double d2 = distance(panel.mount, pts[v]);
        const HopBudget b = hop_budget(RisHop{d1, d2, panel}, radio);
        if (!b.feasible) continue;
        g.edges.push_back({u, v, RisLink{r, d1, d2}, b, b.pl_db + radio.hop_penalty_db});
      }
    }
    out.panel_members.push_back(std::move(members));
  }
  return out;
}

struct Tree {
  std::vector<double> dist;
  std::vector<int> hops;
  std::vector<std::size_t> pred_edge;
  std::vector<std::vector<std::size_t>> seq;
};

constexpr std::size_t kNoEdge = ~std::size_t{0};

Tree dijkstra(const BackhaulGraph& g, std::size_t src)
{
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.nodes[a].id < g.nodes[b].id; });
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;
  auto lex_less = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; });
  };

  Tree t{std::vector<double>(n, kUnreachable), std::vector<int>(n, 0), std::vector<std::size_t>(n, kNoEdge),
         std::vector<std::vector<std::size_t>>(n)};
  const auto adj = g.adjacency();
  std::vector<bool> done(n, false);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  t.dist[src] = 0.0;
  t.seq[src] = {src};
  pq.push({0.0, src});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u] || d > t.dist[u]) continue;
    done[u] = true;
    for (std::size_t ei : adj[u]) {
      const BackhaulEdge& e = g.edges[ei];
      const std::size_t v = e.u == u ? e.v : e.u;
      if (done[v]) continue;
      const double nd = d + e.cost;
      bool better = nd < t.dist[v];
      std::vector<std::size_t> cand;
      if (!better && nd == t.dist[v]) {
        cand = t.seq[u];
        cand.push_back(v);
        better = lex_less(cand, t.seq[v]);
      }
      if (!better) continue;
      if (cand.empty()) {
        cand = t.seq[u];
        cand.push_back(v);
      }
      t.dist[v] = nd;
      t.hops[v] = t.hops[u] + 1;
      t.pred_edge[v] = ei;
      t.seq[v] = std::move(cand);
      pq.push({nd, v});
    }
  }
  return t;
}

PathHop make_hop(const BackhaulGraph& g, const BackhaulEdge& e, const std::string& from_id, const std::string& to_id)
{
  PathHop h{from_id, to_id, std::nullopt, 0.0, e.budget, e.cost};
  if (const auto* r = std::get_if<RisLink>(&e.link)) {
    h.ris_id = g.panels[r->panel].id;
    h.length_m = r->d1_m + r->d2_m;
  } else {
    h.length_m = std::get<DirectLink>(e.link).d_m;
  }
  return h;
}

void finish(BackhaulPath& p)
{
  p.drone_count = static_cast<int>(p.hops.size());
  p.bottleneck_bps = kUnreachable;
  p.total_cost = 0.0;
  for (const PathHop& h : p.hops) {
    p.bottleneck_bps = std::min(p.bottleneck_bps, h.budget.capacity_bps);
    p.total_cost += h.cost;
  }
  if (p.hops.empty()) p.bottleneck_bps = 0.0;
}

}  // namespace

std::size_t BackhaulGraph::index_of(std::string_view id) const
{
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw std::invalid_argument("unknown node id " + std::string(id));
}

std::vector<std::vector<std::size_t>> BackhaulGraph::adjacency() const
{
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back(i);
    if (edges[i].v != edges[i].u) adj[edges[i].v].push_back(i);
  }
  return adj;
}

std::vector<BackhaulNode> candidate_sites(const Scenario& s, std::vector<std::string>* warnings)
{
  std::vector<BackhaulNode> out;
  for (const Building& b : s.buildings) {
    CornerInflation inf = inflate_corners(b, s.clearance_m);
    if (warnings) warnings->insert(warnings->end(), inf.warnings.begin(), inf.warnings.end());
    for (const InflatedCorner& c : inf.corners) {
      if (!outside_all(c.pos, s.buildings)) {
        if (warnings) {
          warnings->push_back("building " + b.id + " vertex " + std::to_string(c.vertex) +
                              ": candidate site blocked by another footprint");
        }
        continue;
      }
      out.push_back({b.id + "/c" + std::to_string(c.vertex), c.pos, NodeKind::drs_candidate});
    }
  }
  return out;
}

BackhaulGraph assemble_backhaul_graph(const Scenario& s, std::span<const Point> targets)
{
  std::vector<std::string> warnings;
  std::vector<BackhaulNode> nodes{{kMbsId, s.mbs, NodeKind::mbs}};
  for (BackhaulNode& c : candidate_sites(s, &warnings)) nodes.push_back(std::move(c));
  for (std::size_t k = 0; k < targets.size(); ++k) {
    nodes.push_back({"AP" + std::to_string(k), targets[k], NodeKind::ap_target});
  }
  const ObstacleMap obstacles(s.buildings);
  Assembly a = connect(s, std::move(nodes), obstacles);
  a.graph.warnings = std::move(warnings);
  return std::move(a.graph);
}

std::optional<BackhaulPath> shortest_backhaul_path(const BackhaulGraph& g, std::string_view src,
                                                   std::string_view dst, int n_max)
{
  const std::size_t s = g.index_of(src);
  const std::size_t t = g.index_of(dst);
  if (s == t) return std::nullopt;
  const Tree tree = dijkstra(g, s);
  if (tree.dist[t] == kUnreachable || tree.hops[t] > n_max) return std::nullopt;

  BackhaulPath p;
  const auto& seq = tree.seq[t];
  for (std::size_t i : seq) p.nodes.push_back(g.nodes[i].id);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const BackhaulEdge& e = g.edges[tree.pred_edge[seq[k]]];
    p.hops.push_back(make_hop(g, e, g.nodes[seq[k - 1]].id, g.nodes[seq[k]].id));
  }
  finish(p);
  return p;
}

BackhaulPlanner::BackhaulPlanner(Scenario s) : scenario_(std::move(s)), obstacles_(scenario_.buildings)
{
  std::vector<std::string> warnings;
  std::vector<BackhaulNode> nodes{{kMbsId, scenario_.mbs, NodeKind::mbs}};
  for (BackhaulNode& c : candidate_sites(scenario_, &warnings)) nodes.push_back(std::move(c));
  Assembly a = connect(scenario_, std::move(nodes), obstacles_);
  base_ = std::move(a.graph);
  base_.warnings = std::move(warnings);
  panel_members_ = std::move(a.panel_members);
  vis_edges_ = a.vis_edges;

  for (const BackhaulNode& n : base_.nodes) probe_points_.push_back(n.pos);
  for (const RisPanel& p : base_.panels) probe_points_.push_back(p.mount);

  Tree t = dijkstra(base_, 0);
  dist_ = std::move(t.dist);
  hops_ = std::move(t.hops);
  pred_edge_ = std::move(t.pred_edge);
  sequence_ = std::move(t.seq);
}

CoverageRecord BackhaulPlanner::evaluate(Point target) const
{
  static const std::string kTargetId = "AP0";
  CoverageRecord rec;
  rec.target = target;
  if (!outside_all(target, scenario_.buildings)) {
    rec.in_building = true;
    return rec;
  }
  const RadioParams& radio = scenario_.radio;
  const std::size_t nbase = base_.nodes.size();
  const std::vector<bool> seen = obstacles_.visible(target, probe_points_);

  struct Best {
    std::size_t via = 0;
    double cost = kUnreachable;
    HopBudget budget;
    std::variant<DirectLink, RisLink> link = DirectLink{0.0};
  } best;

  // seq(u) + [target] against seq(best) + [target], by node id.
  auto id_of = [&](std::size_t i) -> const std::string& { return i == nbase ? kTargetId : base_.nodes[i].id; };
  auto seq_less = [&](std::size_t u, std::size_t w) {
    std::vector<std::size_t> a = sequence_[u];
    std::vector<std::size_t> b = sequence_[w];
    a.push_back(nbase);
    b.push_back(nbase);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](std::size_t x, std::size_t y) { return id_of(x) < id_of(y); });
  };
  auto offer = [&](std::size_t u, const HopBudget& b, std::variant<DirectLink, RisLink> link) {
    if (!b.feasible || dist_[u] == kUnreachable) return;
    const double c = dist_[u] + (b.pl_db + radio.hop_penalty_db);
    if (c < best.cost || (c == best.cost && u != best.via && seq_less(u, best.via))) best = {u, c, b, link};
  };

  for (std::size_t u = 0; u < nbase; ++u) {
    if (!seen[u]) continue;
    const double d = distance(base_.nodes[u].pos, target);
    if (d <= 0) continue;
    offer(u, hop_budget(DirectHop{d}, radio), DirectLink{d});
  }
  for (std::size_t r = 0; r < base_.panels.size(); ++r) {
    const RisPanel& panel = base_.panels[r];
    if (!seen[nbase + r] || !in_front_of(panel, target)) continue;
    const double d2 = distance(panel.mount, target);
    for (std::size_t u : panel_members_[r]) {
      const double d1 = distance(base_.nodes[u].pos, panel.mount);
      offer(u, hop_budget(RisHop{d1, d2, panel}, radio), RisLink{r, d1, d2});
    }
  }

  if (best.cost == kUnreachable || hops_[best.via] + 1 > scenario_.drone_budget_n) return rec;

  BackhaulPath p;
  const auto& seq = sequence_[best.via];
  for (std::size_t i : seq) p.nodes.push_back(base_.nodes[i].id);
  p.nodes.push_back(kTargetId);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const BackhaulEdge& e = base_.edges[pred_edge_[seq[k]]];
    p.hops.push_back(make_hop(base_, e, base_.nodes[seq[k - 1]].id, base_.nodes[seq[k]].id));
  }
  const BackhaulEdge last{best.via, nbase, best.link, best.budget, best.budget.pl_db + radio.hop_penalty_db};
  p.hops.push_back(make_hop(base_, last, base_.nodes[best.via].id, kTargetId));
  finish(p);

  rec.covered = true;
  rec.drone_count = p.drone_count;
  rec.bottleneck_bps = p.bottleneck_bps;
  rec.path = std::move(p);
  return rec;
}

CoverageReport coverage_set(const Scenario& s, std::span<const Point> targets)
{
  const BackhaulPlanner planner(s);
  CoverageReport rep;
  for (const Point& t : targets) {
    rep.records.push_back(planner.evaluate(t));
    if (rep.records.back().covered) ++rep.covered_count;
  }
  return rep;
}

std::string format_path_record(const CoverageRecord& r)
{
  char head[160];
  std::snprintf(head, sizeof head, "target_x=%.10g target_y=%.10g covered=%d hops=%d bottleneck_mbps=%.6g",
                r.target.x, r.target.y, r.covered ? 1 : 0, r.drone_count, r.bottleneck_bps / 1e6);
  std::string seq = "-";
  std::string flags = "-";
  if (r.path) {
    seq.clear();
    flags.clear();
    for (std::size_t i = 0; i < r.path->nodes.size(); ++i) seq += (i ? "," : "") + r.path->nodes[i];
    for (std::size_t i = 0; i < r.path->hops.size(); ++i) {
      flags += (i ? "," : "");
      flags += r.path->hops[i].ris_id ? "1" : "0";
    }
  }
  return std::string(head) + " node_sequence=" + seq + " via_ris_flags=" + flags;
}

}  // namespace dronehaul
