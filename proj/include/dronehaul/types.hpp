#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace dronehaul {

/// Planar position in a local metric frame (x east, y north).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

struct Segment {
  Point a;
  Point b;
};

/// Building footprint. Loaded footprints are counter-clockwise without a
/// closing duplicate vertex.
struct Building {
  std::string id;
  std::vector<Point> footprint;
};

struct RisPanel {
  std::string id;
  Segment wall;
  Point mount;
  Point outward_normal;
  int elements_m = 3;
  double gain_bf_db = 15.0;
};

/// Link-budget constants. Defaults are the 38 GHz urban values used
/// throughout: 100 mW transmit power, -131 dBm noise, 18.72 MHz effective
/// band, 41 dB minimum SNR.
struct RadioParams {
  double pl_ref_db = 39.0;
  double d0_m = 5.0;
  double alpha = 2.13;
  double beta = 2.13;
  double tx_power_dbm = 20.0;
  double tx_power_max_dbm = 20.0;
  double noise_dbm = -131.0;
  double g_tx_dbi = 0.0;
  double g_rx_dbi = 0.0;
  double eta = 0.82;
  double b_eff_hz = 18.72e6;
  double snr_min_db = 41.0;
  double hop_penalty_db = 1000.0;
  bool normalize_by_d0 = true;
};

struct Scenario {
  std::vector<Building> buildings;
  Point mbs;
  std::vector<RisPanel> ris_panels;
  RadioParams radio;
  int drone_budget_n = 3;
  double clearance_m = 0.5;
};

}  // namespace dronehaul
