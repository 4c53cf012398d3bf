#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "dronehaul/cli.hpp"
#include "dronehaul/geojson.hpp"
#include "support.hpp"

using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / ("dronehaul_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Last stderr line is the machine-readable run report.
nlohmann::json report_of(const Run& r)
{
  const auto end = r.err.find_last_not_of('\n');
  const auto start = r.err.rfind('\n', end);
  return nlohmann::json::parse(r.err.substr(start == std::string::npos ? 0 : start + 1, end - start));
}

}  // namespace

TEST_CASE("validate")
{
  const Run ok = run({"validate", fixture("corridor.json")});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.empty());
  CHECK(report_of(ok)["command"] == "validate");

  const Run bad = run({"validate", fixture("mbs_in_building.json")});
  CHECK(bad.code == kExitValidation);
  CHECK(bad.out == "mbs.position: inside building B1\n");

  CHECK(run({"validate", fixture("truncated.json")}).code == kExitParse);
  CHECK(run({"validate", fixture("missing.json")}).code == kExitIo);
}

TEST_CASE("plan")
{
  const Run open = run({"plan", fixture("open_field.json"), "--target", "50", "0"});
  CHECK(open.code == kExitOk);
  CHECK(open.out.find("covered=1 hops=1 ") != std::string::npos);
  CHECK(open.out.find("node_sequence=MBS,AP0 via_ris_flags=0") != std::string::npos);
  const auto rep = report_of(open);
  CHECK(rep["command"] == "plan");
  CHECK(rep["scenario"]["buildings"] == 0);
  CHECK(rep.contains("wall_ms"));
  CHECK(rep["warnings"].is_array());

  const Run blocked = run({"plan", fixture("corridor.json"), "--target", "30", "5", "--disable-ris"});
  CHECK(blocked.code == kExitUnreachable);
  CHECK(blocked.out.find("covered=0") != std::string::npos);

  const Run reflected = run({"plan", fixture("corridor.json"), "--target", "30", "5", "--enable-ris"});
  CHECK(reflected.code == kExitOk);
  CHECK(reflected.out.find("covered=1 hops=1 ") != std::string::npos);
  CHECK(reflected.out.find("via_ris_flags=1") != std::string::npos);

  CHECK(run({"plan", fixture("corridor.json"), "--target", "30", "5", "--disable-ris", "--n", "3"}).code == kExitOk);

  const Run inside = run({"plan", fixture("corridor.json"), "--target", "0", "10"});
  CHECK(inside.code == kExitValidation);
  CHECK(inside.out == "target: inside building blocker\n");

  CHECK(run({"plan", fixture("corridor.json")}).code == kExitParse);
  CHECK(run({"plan", fixture("corridor.json"), "--target", "x", "5"}).code == kExitParse);
  CHECK(run({"bogus"}).code == kExitParse);
}

TEST_CASE("heatmap")
{
  const fs::path dir = scratch("heatmap");
  const std::vector<std::string> args{"heatmap", fixture("open_field.json"), "--grid", "-50", "-50", "100", "100", "10",
                                      "--out", dir.string()};
  const Run csv = run(args);
  REQUIRE(csv.code == kExitOk);
  const std::string thr = slurp((dir / "throughput.csv").string());
  std::istringstream rows(thr);
  std::string line;
  std::getline(rows, line);
  CHECK(line == "x,y,covered,hops,bottleneck_mbps");
  int n = 0;
  while (std::getline(rows, line)) {
    ++n;
    CHECK(line.find(",1,1,") != std::string::npos);
  }
  CHECK(n == 100);
  CHECK(slurp((dir / "hops.csv").string()).rfind("x,y,covered,hops\n", 0) == 0);

  REQUIRE(run(args).code == kExitOk);
  CHECK(slurp((dir / "throughput.csv").string()) == thr);

  auto pgm_args = args;
  pgm_args.insert(pgm_args.end(), {"--format", "pgm"});
  REQUIRE(run(pgm_args).code == kExitOk);
  CHECK(slurp((dir / "throughput.pgm").string()).rfind("P2\n10 10\n255\n", 0) == 0);
  CHECK(slurp((dir / "hops.pgm").string()).rfind("P2\n10 10\n1\n", 0) == 0);

  const Run defaults = run({"heatmap", fixture("corridor.json"), "--out", dir.string()});
  CHECK(defaults.code == kExitOk);

  const fs::path blocker = dir / "file";
  std::ofstream(blocker) << "x";
  CHECK(run({"heatmap", fixture("open_field.json"), "--out", (blocker / "sub").string()}).code == kExitIo);
  CHECK(run({"heatmap", fixture("open_field.json"), "--format", "png", "--out", dir.string()}).code == kExitParse);
  CHECK(run({"heatmap", fixture("open_field.json"), "--grid", "0", "0", "1", "1", "5", "--out", dir.string()}).code ==
        kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("visgraph")
{
  const Run r = run({"visgraph", fixture("corridor.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("MBS blocker/c0 ", 0) == 0);
  CHECK(r.out.find("MBS ris:R1 46.097722\n") != std::string::npos);
}

TEST_CASE("convert-geojson")
{
  const fs::path dir = scratch("geojson");
  const std::string out = (dir / "square.json").string();
  REQUIRE(run({"convert-geojson", fixture("square.geojson"), out}).code == kExitOk);
  const Scenario s = load_scenario(slurp(out));
  REQUIRE(s.buildings.size() == 1);
  CHECK(s.buildings[0].id == "way/1");
  CHECK(s.buildings[0].footprint.size() == 4);

  const Run hole = run({"convert-geojson", fixture("hole.geojson"), out});
  CHECK(hole.code == kExitOk);
  CHECK(hole.err.find("hole") != std::string::npos);
  CHECK(hole.err.find("not a polygon") != std::string::npos);
  CHECK(load_scenario(slurp(out)).buildings.size() == 1);

  const Run empty = run({"convert-geojson", fixture("empty.geojson"), out});
  CHECK(empty.code == kExitOk);
  CHECK(empty.err.find("no polygon buildings") != std::string::npos);
  CHECK(load_scenario(slurp(out)).buildings.empty());

  CHECK(run({"convert-geojson", fixture("truncated.json"), out}).code == kExitParse);
  CHECK(run({"convert-geojson", fixture("corridor.json"), out}).code == kExitParse);
  CHECK(run({"convert-geojson", fixture("nope.geojson"), out}).code == kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("geojson projection")
{
  const double m_per_deg = 6371008.8 * std::numbers::pi / 180.0;
  const Point north = project_aeqd(17.0, 52.001, 17.0, 52.0);
  CHECK(north.x == doctest::Approx(0.0));
  CHECK(north.y == doctest::Approx(0.001 * m_per_deg).epsilon(1e-9));
  const Point east = project_aeqd(17.001, 0.0, 17.0, 0.0);
  CHECK(east.x == doctest::Approx(0.001 * m_per_deg).epsilon(1e-9));
  CHECK(project_aeqd(17.0, 52.0, 17.0, 52.0) == Point{0, 0});

  const auto conv = convert_geojson(slurp(fixture("square.geojson")));
  const Scenario s = load_scenario(conv.document);
  const auto& fp = s.buildings[0].footprint;
  // 0.0003 deg of longitude at 52.406 N and 0.0002 deg of latitude.
  const double w = 0.0003 * m_per_deg * std::cos(52.4061 * std::numbers::pi / 180.0);
  const double h = 0.0002 * m_per_deg;
  CHECK(signed_area(fp) == doctest::Approx(w * h).epsilon(1e-4));
  CHECK(conv.center_lon == doctest::Approx(16.92515));
  CHECK(conv.center_lat == doctest::Approx(52.4061));
}
