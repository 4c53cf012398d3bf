#include "dronehaul/geojson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

#include "dronehaul/geometry.hpp"
#include "dronehaul/scenario.hpp"

namespace dronehaul {

using nlohmann::json;

namespace {

constexpr double kEarthRadiusM = 6371008.8;  // mean radius
constexpr double kDeg = std::numbers::pi / 180.0;

using Ring = std::vector<std::pair<double, double>>;

Ring read_ring(const json& j)
{
  if (!j.is_array()) throw ParseError("GeoJSON ring must be an array of positions");
  Ring ring;
  for (const json& pos : j) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw ParseError("GeoJSON position must be [lon, lat]");
    }
    ring.emplace_back(pos[0].get<double>(), pos[1].get<double>());
  }
  return ring;
}

std::string feature_id(const json& f, std::size_t index)
{
  auto str = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return {};
  };
  std::string id;
  if (f.contains("id")) id = str(f["id"]);
  if (id.empty() && f.contains("properties") && f["properties"].is_object()) {
    const json& p = f["properties"];
    for (const char* key : {"@id", "id", "osm_id"}) {
      if (p.contains(key)) id = str(p[key]);
      if (!id.empty()) break;
    }
  }
  if (id.empty()) id = "b" + std::to_string(index);
  std::replace(id.begin(), id.end(), ' ', '_');
  return id;
}

}  // namespace

Point project_aeqd(double lon_deg, double lat_deg, double lon0_deg, double lat0_deg)
{
  const double phi = lat_deg * kDeg;
  const double phi0 = lat0_deg * kDeg;
  const double dlambda = (lon_deg - lon0_deg) * kDeg;
  const double cos_c = std::sin(phi0) * std::sin(phi) + std::cos(phi0) * std::cos(phi) * std::cos(dlambda);
  const double c = std::acos(std::clamp(cos_c, -1.0, 1.0));
  const double k = c < 1e-12 ? 1.0 : c / std::sin(c);
  return {kEarthRadiusM * k * std::cos(phi) * std::sin(dlambda),
          kEarthRadiusM * k * (std::cos(phi0) * std::sin(phi) - std::sin(phi0) * std::cos(phi) * std::cos(dlambda))};
}

GeoJsonConversion convert_geojson(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw ParseError("expected a GeoJSON FeatureCollection");
  }

  GeoJsonConversion out;
  struct Pending {
    std::string id;
    Ring ring;
  };
  std::vector<Pending> pending;

  const json& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& f = features[i];
    const std::string id = feature_id(f, i);
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object()) {
      out.warnings.push_back("feature " + id + ": no geometry, skipped");
      continue;
    }
    const json& geom = f["geometry"];
    const std::string type = geom.value("type", "");
    const json coords = geom.contains("coordinates") ? geom["coordinates"] : json::array();
    std::vector<json> polys;
    if (type == "Polygon") {
      polys.push_back(coords);
    } else if (type == "MultiPolygon" && coords.is_array()) {
      for (const json& p : coords) polys.push_back(p);
    } else {
      out.warnings.push_back("feature " + id + ": geometry type '" + type + "' is not a polygon, skipped");
      continue;
    }
    for (std::size_t k = 0; k < polys.size(); ++k) {
      const json& rings = polys[k];
      if (!rings.is_array() || rings.empty()) {
        out.warnings.push_back("feature " + id + ": empty polygon, skipped");
        continue;
      }
      if (rings.size() > 1) {
        out.warnings.push_back("feature " + id + ": " + std::to_string(rings.size() - 1) +
                               " hole(s) dropped, outer ring kept");
      }
      const std::string pid = polys.size() > 1 ? id + "#" + std::to_string(k) : id;
      pending.push_back({pid, read_ring(rings[0])});
    }
  }

  double sum_lon = 0.0, sum_lat = 0.0;
  std::size_t count = 0;
  for (const Pending& p : pending) {
    const std::size_t n = p.ring.size() > 1 && p.ring.front() == p.ring.back() ? p.ring.size() - 1 : p.ring.size();
    for (std::size_t k = 0; k < n; ++k) {
      sum_lon += p.ring[k].first;
      sum_lat += p.ring[k].second;
      ++count;
    }
  }
  if (count > 0) {
    out.center_lon = sum_lon / static_cast<double>(count);
    out.center_lat = sum_lat / static_cast<double>(count);
  }

  json buildings = json::array();
  std::set<std::string> used;
  double minx = HUGE_VAL, miny = HUGE_VAL;
  for (const Pending& p : pending) {
    std::vector<Point> ring;
    for (const auto& [lon, lat] : p.ring) {
      const Point q = project_aeqd(lon, lat, out.center_lon, out.center_lat);
      if (ring.empty() || !(ring.back() == q)) ring.push_back(q);
    }
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    if (!is_simple_polygon(ring)) {
      out.warnings.push_back("feature " + p.id + ": not a simple polygon, skipped");
      continue;
    }
    if (signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());
    std::string id = p.id;
    for (int n = 2; !used.insert(id).second; ++n) id = p.id + "_" + std::to_string(n);

    json fp = json::array();
    for (const Point& q : ring) {
      fp.push_back(json::array({q.x, q.y}));
      minx = std::min(minx, q.x);
      miny = std::min(miny, q.y);
    }
    buildings.push_back({{"id", id}, {"footprint", fp}});
    ++out.building_count;
  }
  if (out.building_count == 0) out.warnings.push_back("no polygon buildings in the collection");

  json scenario = json::object();
  scenario["meta"] = {{"source", "geojson"},
                      {"projection", "aeqd"},
                      {"center_lon", out.center_lon},
                      {"center_lat", out.center_lat},
                      {"note", "mbs is a placeholder; add ris panels and radio overrides as needed"}};
  scenario["buildings"] = buildings;
  scenario["mbs"] = out.building_count ? json::array({minx - 10.0, miny - 10.0}) : json::array({0.0, 0.0});
  scenario["ris"] = json::array();
  scenario["radio"] = json::object();
  scenario["n"] = 3;
  scenario["clearance_m"] = 0.5;
  out.document = scenario.dump(2) + "\n";
  return out;
}

}  // namespace dronehaul
