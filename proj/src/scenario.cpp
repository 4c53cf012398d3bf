#include "dronehaul/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dronehaul/geometry.hpp"

namespace dronehaul {

using nlohmann::json;

std::string Issue::str() const
{
  std::string out = entity;
  if (!field.empty()) out += "." + field;
  return out + ": " + rule;
}

namespace {

std::string join_issues(const std::vector<Issue>& issues)
{
  std::string msg = "scenario has " + std::to_string(issues.size()) + " validation issue(s)";
  for (const Issue& i : issues) msg += "\n  " + i.str();
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
  throw ParseError(where + ": " + what);
}

double as_number(const json& j, const std::string& where)
{
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Point as_point(const json& j, const std::string& where)
{
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {as_number(j[0], where + "[0]"), as_number(j[1], where + "[1]")};
}

std::string as_id(const json& j, const std::string& where)
{
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail(where, "expected a string or integer id");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      fail(where, "unknown key '" + it.key() + "'");
    }
  }
}

std::vector<Point> normalize_ring(std::vector<Point> ring)
{
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() >= 3 && signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());
  return ring;
}

Point edge_outward_normal(const Building& b, std::size_t edge)
{
  const auto& ring = b.footprint;
  const Point a = ring[edge];
  const Point c = ring[(edge + 1) % ring.size()];
  const Point d = (1.0 / distance(a, c)) * (c - a);
  const Point right{d.y, -d.x};
  return signed_area(ring) >= 0 ? right : -1.0 * right;
}

void read_radio(const json& j, RadioParams& r)
{
  if (!j.is_object()) fail("radio", "expected an object");
  check_keys(j,
             {"pl_ref_db", "d0_m", "alpha", "beta", "tx_power_dbm", "tx_power_max_dbm", "noise_dbm", "g_tx_dbi",
              "g_rx_dbi", "eta", "b_eff_hz", "snr_min_db", "hop_penalty_db", "normalize_by_d0"},
             "radio");
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = as_number(j[key], std::string("radio.") + key);
  };
  num("pl_ref_db", r.pl_ref_db);
  num("d0_m", r.d0_m);
  num("alpha", r.alpha);
  num("beta", r.beta);
  num("tx_power_dbm", r.tx_power_dbm);
  num("tx_power_max_dbm", r.tx_power_max_dbm);
  num("noise_dbm", r.noise_dbm);
  num("g_tx_dbi", r.g_tx_dbi);
  num("g_rx_dbi", r.g_rx_dbi);
  num("eta", r.eta);
  num("b_eff_hz", r.b_eff_hz);
  num("snr_min_db", r.snr_min_db);
  num("hop_penalty_db", r.hop_penalty_db);
  if (j.contains("normalize_by_d0")) {
    if (!j["normalize_by_d0"].is_boolean()) fail("radio.normalize_by_d0", "expected a boolean");
    r.normalize_by_d0 = j["normalize_by_d0"].get<bool>();
  }
}

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

std::optional<WallHost> find_wall_host(const Segment& wall, const std::vector<Building>& buildings)
{
  constexpr double tol = 1e-6;
  for (std::size_t bi = 0; bi < buildings.size(); ++bi) {
    const auto& ring = buildings[bi].footprint;
    if (ring.size() < 3) continue;
    for (std::size_t e = 0; e < ring.size(); ++e) {
      const Segment edge{ring[e], ring[(e + 1) % ring.size()]};
      if (edge.a == edge.b) continue;
      if (point_segment_distance(wall.a, edge) <= tol && point_segment_distance(wall.b, edge) <= tol) {
        return WallHost{bi, e, edge_outward_normal(buildings[bi], e)};
      }
    }
  }
  return std::nullopt;
}

LoadResult parse_scenario(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "expected a JSON object");
  check_keys(doc, {"buildings", "mbs", "ris", "radio", "n", "clearance_m", "meta"}, "document");

  LoadResult out;
  Scenario& s = out.scenario;

  if (doc.contains("buildings")) {
    const json& arr = doc["buildings"];
    if (!arr.is_array()) fail("buildings", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "buildings[" + std::to_string(i) + "]";
      const json& b = arr[i];
      if (!b.is_object()) fail(where, "expected an object");
      check_keys(b, {"id", "footprint"}, where);
      if (!b.contains("id")) fail(where, "missing 'id'");
      if (!b.contains("footprint") || !b["footprint"].is_array()) fail(where, "missing 'footprint' array");
      Building bld;
      bld.id = as_id(b["id"], where + ".id");
      const json& fp = b["footprint"];
      for (std::size_t k = 0; k < fp.size(); ++k) {
        bld.footprint.push_back(as_point(fp[k], where + ".footprint[" + std::to_string(k) + "]"));
      }
      bld.footprint = normalize_ring(std::move(bld.footprint));
      s.buildings.push_back(std::move(bld));
    }
  }

  if (!doc.contains("mbs")) fail("document", "missing 'mbs'");
  s.mbs = as_point(doc["mbs"], "mbs");

  if (doc.contains("radio")) read_radio(doc["radio"], s.radio);

  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer()) fail("n", "expected an integer");
    s.drone_budget_n = doc["n"].get<int>();
  }
  if (doc.contains("clearance_m")) s.clearance_m = as_number(doc["clearance_m"], "clearance_m");

  if (doc.contains("ris")) {
    const json& arr = doc["ris"];
    if (!arr.is_array()) fail("ris", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "ris[" + std::to_string(i) + "]";
      const json& r = arr[i];
      if (!r.is_object()) fail(where, "expected an object");
      check_keys(r, {"id", "wall", "mount", "normal", "m", "gain_bf_db"}, where);
      if (!r.contains("id")) fail(where, "missing 'id'");
      if (!r.contains("wall") || !r["wall"].is_array() || r["wall"].size() != 2) {
        fail(where, "'wall' must be [[x,y],[x,y]]");
      }
      RisPanel p;
      p.id = as_id(r["id"], where + ".id");
      p.wall = {as_point(r["wall"][0], where + ".wall[0]"), as_point(r["wall"][1], where + ".wall[1]")};
      p.mount = r.contains("mount") ? as_point(r["mount"], where + ".mount") : 0.5 * (p.wall.a + p.wall.b);
      if (r.contains("normal")) {
        p.outward_normal = as_point(r["normal"], where + ".normal");
      } else if (auto host = find_wall_host(p.wall, s.buildings)) {
        p.outward_normal = host->outward_normal;
      }
      if (r.contains("m")) {
        if (!r["m"].is_number_integer()) fail(where + ".m", "expected an integer");
        p.elements_m = r["m"].get<int>();
      }
      if (r.contains("gain_bf_db")) p.gain_bf_db = as_number(r["gain_bf_db"], where + ".gain_bf_db");
      s.ris_panels.push_back(std::move(p));
    }
  }

  out.issues = validate_scenario(s);
  return out;
}

Scenario load_scenario(std::string_view text)
{
  LoadResult r = parse_scenario(text);
  if (!r.issues.empty()) throw ValidationError(std::move(r.issues));
  return std::move(r.scenario);
}

Scenario load_scenario_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::vector<Issue> validate_scenario(const Scenario& s)
{
  std::vector<Issue> issues;
  auto add = [&](std::string entity, std::string field, std::string rule) {
    issues.push_back({std::move(entity), std::move(field), std::move(rule)});
  };

  std::set<std::string> seen;
  for (const Building& b : s.buildings) {
    const std::string ent = "building " + b.id;
    if (b.id.empty()) add(ent, "id", "empty id");
    if (!seen.insert(b.id).second) add(ent, "id", "duplicate building id");
    const auto& ring = b.footprint;
    if (ring.size() < 3) {
      add(ent, "footprint", "fewer than 3 vertices");
      continue;
    }
    if (!std::all_of(ring.begin(), ring.end(), finite)) {
      add(ent, "footprint", "non-finite coordinate");
      continue;
    }
    bool dup = false;
    for (std::size_t i = 0; i < ring.size(); ++i) dup |= ring[i] == ring[(i + 1) % ring.size()];
    if (dup) {
      add(ent, "footprint", "consecutive duplicate vertices");
      continue;
    }
    if (!is_simple_polygon(ring)) {
      add(ent, "footprint", "not a simple polygon");
      continue;
    }
    if (signed_area(ring) <= 0) add(ent, "footprint", "vertices not counter-clockwise");
  }

  if (!finite(s.mbs)) {
    add("mbs", "position", "non-finite coordinate");
  } else {
    for (const Building& b : s.buildings) {
      if (b.footprint.size() < 3) continue;
      switch (point_in_polygon(s.mbs, b)) {
        case PolygonSide::inside: add("mbs", "position", "inside building " + b.id); break;
        case PolygonSide::boundary: add("mbs", "position", "on the boundary of building " + b.id); break;
        case PolygonSide::outside: break;
      }
    }
  }

  seen.clear();
  for (const RisPanel& p : s.ris_panels) {
    const std::string ent = "ris " + p.id;
    if (p.id.empty()) add(ent, "id", "empty id");
    if (!seen.insert(p.id).second) add(ent, "id", "duplicate ris id");
    if (!finite(p.wall.a) || !finite(p.wall.b) || !finite(p.mount) || !finite(p.outward_normal)) {
      add(ent, "wall", "non-finite coordinate");
      continue;
    }
    if (p.wall.a == p.wall.b) {
      add(ent, "wall", "zero-length wall");
    } else if (point_segment_distance(p.mount, p.wall) > 1e-6) {
      add(ent, "mount", "mount is not on the wall segment");
    }
    if (std::abs(norm(p.outward_normal) - 1.0) > 1e-9) add(ent, "normal", "not a unit vector");
    const auto host = p.wall.a == p.wall.b ? std::nullopt : find_wall_host(p.wall, s.buildings);
    if (!host) {
      add(ent, "wall", "does not lie on any building edge");
    } else if (dot(p.outward_normal, host->outward_normal) <= 0) {
      add(ent, "normal", "points into building " + s.buildings[host->building].id);
    }
    if (p.elements_m < 1) add(ent, "m", "must be >= 1");
    if (!(p.gain_bf_db >= 0)) add(ent, "gain_bf_db", "must be >= 0");
  }

  const RadioParams& r = s.radio;
  const std::pair<const char*, double> all[] = {
      {"pl_ref_db", r.pl_ref_db}, {"d0_m", r.d0_m},         {"alpha", r.alpha},
      {"beta", r.beta},           {"tx_power_dbm", r.tx_power_dbm}, {"tx_power_max_dbm", r.tx_power_max_dbm},
      {"noise_dbm", r.noise_dbm}, {"g_tx_dbi", r.g_tx_dbi}, {"g_rx_dbi", r.g_rx_dbi},
      {"eta", r.eta},             {"b_eff_hz", r.b_eff_hz}, {"snr_min_db", r.snr_min_db},
      {"hop_penalty_db", r.hop_penalty_db}};
  for (const auto& [name, v] : all) {
    if (!std::isfinite(v)) add("radio", name, "not finite");
  }
  if (r.tx_power_dbm > r.tx_power_max_dbm) add("radio", "tx_power_dbm", "exceeds tx_power_max_dbm");
  if (!(r.eta > 0 && r.eta <= 1)) add("radio", "eta", "must be in (0, 1]");
  if (!(r.b_eff_hz > 0)) add("radio", "b_eff_hz", "must be > 0");
  if (!(r.d0_m > 0)) add("radio", "d0_m", "must be > 0");
  if (!(r.alpha > 0)) add("radio", "alpha", "must be > 0");
  if (!(r.beta > 0)) add("radio", "beta", "must be > 0");
  if (!(r.hop_penalty_db >= 0)) add("radio", "hop_penalty_db", "must be >= 0");

  if (s.drone_budget_n < 1) add("scenario", "n", "drone budget must be >= 1");
  if (!(s.clearance_m > 0)) add("scenario", "clearance_m", "must be > 0");
  return issues;
}

namespace {

json point_json(Point p) { return json::array({p.x, p.y}); }

}  // namespace

std::string serialize_scenario(const Scenario& s)
{
  json doc = json::object();
  json buildings = json::array();
  for (const Building& b : s.buildings) {
    json fp = json::array();
    for (const Point& p : b.footprint) fp.push_back(point_json(p));
    buildings.push_back({{"id", b.id}, {"footprint", fp}});
  }
  doc["buildings"] = buildings;
  doc["mbs"] = point_json(s.mbs);
  json ris = json::array();
  for (const RisPanel& p : s.ris_panels) {
    ris.push_back({{"id", p.id},
                   {"wall", json::array({point_json(p.wall.a), point_json(p.wall.b)})},
                   {"mount", point_json(p.mount)},
                   {"normal", point_json(p.outward_normal)},
                   {"m", p.elements_m},
                   {"gain_bf_db", p.gain_bf_db}});
  }
  doc["ris"] = ris;
  const RadioParams& r = s.radio;
  doc["radio"] = {{"pl_ref_db", r.pl_ref_db},
                  {"d0_m", r.d0_m},
                  {"alpha", r.alpha},
                  {"beta", r.beta},
                  {"tx_power_dbm", r.tx_power_dbm},
                  {"tx_power_max_dbm", r.tx_power_max_dbm},
                  {"noise_dbm", r.noise_dbm},
                  {"g_tx_dbi", r.g_tx_dbi},
                  {"g_rx_dbi", r.g_rx_dbi},
                  {"eta", r.eta},
                  {"b_eff_hz", r.b_eff_hz},
                  {"snr_min_db", r.snr_min_db},
                  {"hop_penalty_db", r.hop_penalty_db},
                  {"normalize_by_d0", r.normalize_by_d0}};
  doc["n"] = s.drone_budget_n;
  doc["clearance_m"] = s.clearance_m;
  return doc.dump(2) + "\n";
}

}  // namespace dronehaul
