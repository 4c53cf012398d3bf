#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dronehaul/channel.hpp"
#include "dronehaul/types.hpp"
#include "dronehaul/visibility.hpp"

namespace dronehaul {

struct DirectLink {
  double d_m;
};

struct RisLink {
  std::size_t panel;  // index into the scenario's ris_panels
  double d1_m;        // u -> panel
  double d2_m;        // panel -> v
};

/// One feasible hop. Infeasible hops are never materialized. A reflection via
/// a RIS panel is a single hop between two drones; the panel never appears as
/// a path node.
struct BackhaulEdge {
  std::size_t u;
  std::size_t v;
  std::variant<DirectLink, RisLink> link;
  HopBudget budget;
  double cost;  // pl_db + hop penalty

  bool via_ris() const { return std::holds_alternative<RisLink>(link); }
};

struct BackhaulNode {
  std::string id;
  Point pos;
  NodeKind kind;
};

class BackhaulGraph {
 public:
  std::vector<BackhaulNode> nodes;
  std::vector<BackhaulEdge> edges;
  std::vector<RisPanel> panels;
  std::vector<std::string> warnings;

  /// Throws std::invalid_argument for an unknown id.
  std::size_t index_of(std::string_view id) const;

  /// Edge indices incident to each node, ascending.
  std::vector<std::vector<std::size_t>> adjacency() const;
};

struct PathHop {
  std::string from;
  std::string to;
  std::optional<std::string> ris_id;
  double length_m;  // d, or d1 + d2 for a reflected hop
  HopBudget budget;
  double cost;
};

struct BackhaulPath {
  std::vector<std::string> nodes;  // MBS first, target last
  std::vector<PathHop> hops;
  int drone_count = 0;
  double bottleneck_bps = 0.0;
  double total_cost = 0.0;
};

/// Candidate drone sites: convex building corners pushed out by the
/// clearance, dropped when they land on or inside any footprint.
std::vector<BackhaulNode> candidate_sites(const Scenario& s, std::vector<std::string>* warnings = nullptr);

/// Weighted graph over {MBS} + candidate sites + targets ("AP0", "AP1", ...)
/// with every feasible direct LoS hop and every feasible hop reflected by a
/// panel whose two endpoints are visible from the mount and lie strictly on
/// the outward side of its wall.
BackhaulGraph assemble_backhaul_graph(const Scenario& s, std::span<const Point> targets);

/// Penalized Dijkstra. Returns nullopt when dst is unreachable or the
/// cheapest path needs more than n_max drones. Equal-cost ties go to the
/// lexicographically smallest node-id sequence.
std::optional<BackhaulPath> shortest_backhaul_path(const BackhaulGraph& g, std::string_view src,
                                                   std::string_view dst, int n_max);

struct CoverageRecord {
  Point target;
  bool in_building = false;
  bool covered = false;
  int drone_count = 0;
  double bottleneck_bps = 0.0;
  std::optional<BackhaulPath> path;
};

struct CoverageReport {
  std::vector<CoverageRecord> records;
  std::size_t covered_count = 0;  // |A|
};

/// Per-target planning against a graph built once per scenario. Only the
/// target's own hops are computed per query; the shortest-path tree from the
/// MBS over the candidate sites is shared. Queries are const and may run
/// concurrently.
class BackhaulPlanner {
 public:
  explicit BackhaulPlanner(Scenario s);

  /// Plans a backhaul to a single AP target, named "AP0" in the path.
  CoverageRecord evaluate(Point target) const;

  const Scenario& scenario() const { return scenario_; }
  const BackhaulGraph& base_graph() const { return base_; }
  std::size_t visibility_edge_count() const { return vis_edges_; }

 private:
  Scenario scenario_;
  ObstacleMap obstacles_;
  BackhaulGraph base_;
  std::size_t vis_edges_ = 0;
  std::vector<Point> probe_points_;  // base node positions, then panel mounts
  std::vector<std::vector<std::size_t>> panel_members_;
  std::vector<double> dist_;
  std::vector<int> hops_;
  std::vector<std::size_t> pred_edge_;
  std::vector<std::vector<std::size_t>> sequence_;
};

/// Evaluates each target independently (one AP location at a time).
CoverageReport coverage_set(const Scenario& s, std::span<const Point> targets);

/// "target_x=.. target_y=.. covered=.. hops=.. bottleneck_mbps=.. node_sequence=a,b via_ris_flags=0,1"
std::string format_path_record(const CoverageRecord& r);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

}  // namespace dronehaul
