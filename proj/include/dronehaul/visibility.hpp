#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dronehaul/types.hpp"

namespace dronehaul {

enum class NodeKind { mbs, drs_candidate, ap_target, ris };

const char* to_string(NodeKind k);

struct VisNode {
  std::string id;
  Point pos;
  NodeKind kind = NodeKind::drs_candidate;
};

struct VisEdge {
  std::size_t a;  // node index, a < b
  std::size_t b;
  double length_m;

  friend bool operator==(const VisEdge&, const VisEdge&) = default;
};

struct VisibilityGraph {
  std::vector<VisNode> nodes;
  std::vector<VisEdge> edges;  // sorted by (a, b)

  /// One "id_a id_b length_m" line per edge with id_a < id_b, lines sorted.
  std::string edge_list() const;
};

/// Counters collected by one angular sweep.
struct SweepStats {
  std::size_t events = 0;       // obstacle points + targets swept
  std::size_t status_ops = 0;   // insertions, removals and queries on the status tree
  std::size_t comparisons = 0;  // comparator calls made by the status tree
};

/// Building edges prepared for repeated angular sweeps.
///
/// Edges of different footprints are split wherever they cross or touch so
/// that the remaining pieces only meet at shared endpoints; that keeps the
/// distance order of the sweep status stable between events even when
/// footprints overlap or share walls. Every split point remembers the local
/// interior cones (vertex wedge or edge half-plane) of all footprints it lies
/// on, which resolves sight lines passing exactly through boundary points.
class ObstacleMap {
 public:
  explicit ObstacleMap(std::span<const Building> buildings);

  /// Visibility of every target from origin, computed by a rotational plane
  /// sweep. Equivalent to line_of_sight(origin, target, buildings).
  std::vector<bool> visible(Point origin, std::span<const Point> targets, SweepStats* stats = nullptr) const;

  std::size_t point_count() const { return points_.size(); }
  std::size_t piece_count() const { return pieces_.size(); }

  struct Cone {
    Point e_out;  // counter-clockwise boundary ray of the interior
    Point e_in;   // clockwise boundary ray of the interior
    bool half_plane = false;
  };

 private:
  struct Piece {
    std::uint32_t p;
    std::uint32_t q;
  };

  std::vector<Cone> cones_at(Point p) const;

  std::vector<Building> buildings_;
  std::vector<Point> points_;
  std::vector<std::vector<Cone>> point_cones_;
  std::vector<Piece> pieces_;
  std::vector<std::vector<std::uint32_t>> pieces_at_;
};

/// Ids of the nodes in `others` visible from origin (raw geometric
/// visibility; RIS half-plane rules are applied by the planner), sorted.
std::vector<std::string> visible_from(const VisNode& origin, std::span<const VisNode> others,
                                      std::span<const Building> buildings, SweepStats* stats = nullptr);

/// Visibility graph via one sweep per node. Deterministic.
VisibilityGraph build_visibility_graph(std::vector<VisNode> nodes, std::span<const Building> buildings);
VisibilityGraph build_visibility_graph(std::vector<VisNode> nodes, const ObstacleMap& obstacles);

/// All-pairs line_of_sight reference, O(n^2 m). Test oracle.
VisibilityGraph visibility_oracle(std::vector<VisNode> nodes, std::span<const Building> buildings);

}  // namespace dronehaul
