#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dronehaul/types.hpp"

namespace dronehaul {

/// Spherical azimuthal-equidistant projection about (lon0, lat0), degrees in,
/// meters out (x east, y north).
Point project_aeqd(double lon_deg, double lat_deg, double lon0_deg, double lat0_deg);

struct GeoJsonConversion {
  std::string document;  // scenario JSON
  std::size_t building_count = 0;
  double center_lon = 0.0;
  double center_lat = 0.0;
  std::vector<std::string> warnings;
};

/// Converts a polygon FeatureCollection (WGS84 lon/lat) to a scenario
/// document in local meters about the mean vertex position. Polygon holes
/// are dropped, non-polygon features skipped, both with warnings. The MBS is
/// a placeholder just south-west of the footprints; RIS and radio are left
/// empty for the user to fill in. Throws ParseError on malformed input.
GeoJsonConversion convert_geojson(std::string_view text);

}  // namespace dronehaul
