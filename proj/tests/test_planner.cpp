#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "dronehaul/channel.hpp"
#include "dronehaul/planner.hpp"
#include "oracles.hpp"

using namespace testsupport;

namespace {

Scenario open_field(int n)
{
  Scenario s;
  s.mbs = {0, 0};
  s.drone_budget_n = n;
  return s;
}

Scenario corridor() { return load_scenario(slurp(fixture("corridor.json"))); }

void check_path_valid(const Scenario& s, const BackhaulPath& p)
{
  REQUIRE(p.nodes.size() == p.hops.size() + 1);
  REQUIRE(p.drone_count == static_cast<int>(p.hops.size()));
  REQUIRE(p.drone_count <= s.drone_budget_n);
  REQUIRE(p.nodes.front() == "MBS");
  double bottleneck = std::numeric_limits<double>::infinity();
  for (const PathHop& h : p.hops) bottleneck = std::min(bottleneck, h.budget.capacity_bps);
  REQUIRE(p.bottleneck_bps == doctest::Approx(bottleneck).epsilon(1e-9));
}

}  // namespace

TEST_CASE("open field has one direct edge")
{
  const Scenario s = open_field(1);
  const std::vector<Point> targets{{50, 0}};
  const BackhaulGraph g = assemble_backhaul_graph(s, targets);
  REQUIRE(g.nodes.size() == 2);
  REQUIRE(g.edges.size() == 1);
  CHECK_FALSE(g.edges[0].via_ris());
  CHECK(g.edges[0].budget.pl_db == doctest::Approx(60.3).epsilon(1e-12));
  CHECK(g.edges[0].cost == doctest::Approx(1060.3).epsilon(1e-12));
}

TEST_CASE("corridor reflection edges")
{
  const Scenario s = corridor();
  const std::vector<Point> targets{{30, 5}};
  const BackhaulGraph g = assemble_backhaul_graph(s, targets);
  const std::size_t mbs = g.index_of("MBS"), ap = g.index_of("AP0");
  bool direct = false, reflected = false;
  for (const BackhaulEdge& e : g.edges) {
    const bool ends = (e.u == mbs && e.v == ap) || (e.u == ap && e.v == mbs);
    direct |= ends && !e.via_ris();
    reflected |= ends && e.via_ris();
    if (e.via_ris()) {
      const RisPanel& p = s.ris_panels[std::get<RisLink>(e.link).panel];
      REQUIRE(dot(g.nodes[e.u].pos - p.mount, p.outward_normal) > 0);
      REQUIRE(dot(g.nodes[e.v].pos - p.mount, p.outward_normal) > 0);
      REQUIRE(line_of_sight(g.nodes[e.u].pos, p.mount, s.buildings));
      REQUIRE(line_of_sight(g.nodes[e.v].pos, p.mount, s.buildings));
    }
  }
  CHECK_FALSE(direct);
  CHECK(reflected);

  Scenario flipped = s;
  flipped.ris_panels[0].outward_normal = {0, 1};
  const BackhaulGraph h = assemble_backhaul_graph(flipped, targets);
  for (const BackhaulEdge& e : h.edges) CHECK_FALSE(e.via_ris());
}

TEST_CASE("shortest path basics")
{
  const BackhaulGraph one = toy_graph({"MBS", "AP0"}, {{0, 1, 70}});
  const auto p = shortest_backhaul_path(one, "MBS", "AP0", 3);
  REQUIRE(p);
  CHECK(p->drone_count == 1);
  CHECK(p->total_cost == doctest::Approx(1070));
  CHECK_FALSE(shortest_backhaul_path(one, "MBS", "AP0", 0));

  // One lossy hop beats two clean ones under the default penalty.
  const BackhaulGraph tri = toy_graph({"MBS", "a", "AP0"}, {{0, 2, 100}, {0, 1, 50}, {1, 2, 50}});
  const auto q = shortest_backhaul_path(tri, "MBS", "AP0", 3);
  REQUIRE(q);
  CHECK(q->nodes == std::vector<std::string>{"MBS", "AP0"});
  CHECK(q->total_cost == doctest::Approx(1100));
  const BackhaulGraph cheap = toy_graph({"MBS", "a", "AP0"}, {{0, 2, 100}, {0, 1, 40}, {1, 2, 40}}, 0);
  CHECK(shortest_backhaul_path(cheap, "MBS", "AP0", 3)->nodes.size() == 3);

  CHECK_THROWS_AS(shortest_backhaul_path(one, "MBS", "nowhere", 3), std::invalid_argument);
  const BackhaulGraph cut = toy_graph({"MBS", "a", "AP0"}, {{0, 1, 50}});
  CHECK_FALSE(shortest_backhaul_path(cut, "MBS", "AP0", 5));
}

TEST_CASE("equal cost paths go to the smaller id sequence")
{
  const BackhaulGraph g = toy_graph({"MBS", "z", "b", "AP0"}, {{0, 1, 50}, {1, 3, 50}, {0, 2, 50}, {2, 3, 50}});
  const auto p = shortest_backhaul_path(g, "MBS", "AP0", 3);
  REQUIRE(p);
  CHECK(p->nodes == std::vector<std::string>{"MBS", "b", "AP0"});
}

TEST_CASE("dijkstra matches exhaustive enumeration")
{
  Rng rng(83);
  for (int trial = 0; trial < 500; ++trial) {
    const bool integer_loss = trial % 2 == 1;
    const BackhaulGraph g = random_graph(rng, integer_loss);
    const std::size_t src = 0, dst = g.nodes.size() - 1;
    const Best want = enumerate_paths(g, src, dst);
    const auto got = shortest_backhaul_path(g, g.nodes[src].id, g.nodes[dst].id, 100);
    REQUIRE(got.has_value() == std::isfinite(want.cost));
    if (!got) continue;
    REQUIRE(got->total_cost == doctest::Approx(want.cost).epsilon(1e-12));
    REQUIRE(got->drone_count == want.min_hops);
    if (integer_loss) REQUIRE(got->nodes == want.seq);
    REQUIRE_FALSE(shortest_backhaul_path(g, g.nodes[src].id, g.nodes[dst].id, want.min_hops - 1));
  }
}

TEST_CASE("open field coverage")
{
  const std::vector<Point> targets{{50, 0}, {0, 100}, {-200, 0}};
  const CoverageReport r = coverage_set(open_field(1), targets);
  CHECK(r.covered_count == 3);
  for (const auto& rec : r.records) {
    CHECK(rec.covered);
    CHECK(rec.drone_count == 1);
    CHECK(rec.bottleneck_bps == doctest::Approx(capacity_bps(snr_db(pl_direct_db(distance({0, 0}, rec.target), {}), {}), {})));
  }
  CHECK(coverage_set(open_field(0), targets).covered_count == 0);
}

TEST_CASE("corridor needs the panel")
{
  Scenario s = corridor();
  const std::vector<Point> targets{{30, 5}};
  const CoverageReport with = coverage_set(s, targets);
  REQUIRE(with.covered_count == 1);
  CHECK(with.records[0].drone_count == 1);
  REQUIRE(with.records[0].path);
  CHECK(with.records[0].path->hops[0].ris_id == std::optional<std::string>("R1"));
  check_path_valid(s, *with.records[0].path);

  s.ris_panels.clear();
  CHECK(coverage_set(s, targets).covered_count == 0);
  s.drone_budget_n = 2;
  CHECK(coverage_set(s, targets).covered_count == 0);
  s.drone_budget_n = 3;
  CHECK(coverage_set(s, targets).records[0].drone_count == 3);
}

TEST_CASE("targets in buildings are flagged")
{
  const Scenario s = corridor();
  const BackhaulPlanner planner(s);
  CHECK(planner.evaluate({0, 10}).in_building);
  CHECK(planner.evaluate({10, 10}).in_building);
  CHECK_FALSE(planner.evaluate({0, 10}).covered);
}

TEST_CASE("path record format")
{
  const CoverageReport r = coverage_set(corridor(), std::vector<Point>{{30, 5}, {0, 30}});
  const double d = 2 * std::hypot(30.0, 35.0);
  const double pl = 39 + 21.3 * std::log10(9 * d / 5) - 15;
  char mbps[32];
  std::snprintf(mbps, sizeof mbps, "%.6g", 0.82 * 18.72 * std::log2(1 + std::pow(10.0, (151 - pl) / 10)));
  CHECK(format_path_record(r.records[0]) == std::string("target_x=30 target_y=5 covered=1 hops=1 bottleneck_mbps=") +
                                                mbps + " node_sequence=MBS,AP0 via_ris_flags=1");
  Scenario blocked = corridor();
  blocked.ris_panels.clear();
  const CoverageReport none = coverage_set(blocked, std::vector<Point>{{30, 5}});
  CHECK(format_path_record(none.records[0]) ==
        "target_x=30 target_y=5 covered=0 hops=0 bottleneck_mbps=0 node_sequence=- via_ris_flags=-");
}

TEST_CASE("planner queries match a full graph search")
{
  Rng rng(89);
  for (int trial = 0; trial < 25; ++trial) {
    const Scenario s = random_urban(rng, uniform_int(rng, 2, 4), uniform_int(rng, 0, 3), uniform_int(rng, 1, 4));
    const BackhaulPlanner planner(s);
    for (int k = 0; k < 20; ++k) {
      const Point t{uniform(rng, -20, 260), uniform(rng, -20, 260)};
      const CoverageRecord fast = planner.evaluate(t);
      if (fast.in_building) {
        REQUIRE_FALSE(outside_all(t, s.buildings));
        continue;
      }
      const std::vector<Point> one{t};
      const BackhaulGraph g = assemble_backhaul_graph(s, one);
      const auto slow = shortest_backhaul_path(g, "MBS", "AP0", s.drone_budget_n);
      REQUIRE(fast.covered == slow.has_value());
      if (!slow) continue;
      REQUIRE(fast.path->nodes == slow->nodes);
      REQUIRE(fast.drone_count == slow->drone_count);
      REQUIRE(fast.path->total_cost == doctest::Approx(slow->total_cost).epsilon(1e-12));
      REQUIRE(fast.bottleneck_bps == doctest::Approx(slow->bottleneck_bps).epsilon(1e-12));
    }
  }
}

TEST_CASE("returned hops recheck as feasible sight lines")
{
  Rng rng(97);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario s = random_urban(rng, 4, 3, 3);
    const BackhaulPlanner planner(s);
    const auto sites = candidate_sites(s);
    for (int k = 0; k < 30; ++k) {
      const Point t{uniform(rng, -20, 260), uniform(rng, -20, 260)};
      const CoverageRecord rec = planner.evaluate(t);
      if (!rec.covered) continue;
      const BackhaulPath& p = *rec.path;
      check_path_valid(s, p);
      auto pos = [&](const std::string& id) {
        if (id == "MBS") return s.mbs;
        if (id == "AP0") return t;
        for (const BackhaulNode& n : sites) {
          if (n.id == id) return n.pos;
        }
        FAIL("unknown node " << id);
        return Point{};
      };
      for (const PathHop& h : p.hops) {
        const Point a = pos(h.from), b = pos(h.to);
        if (!h.ris_id) {
          REQUIRE(line_of_sight(a, b, s.buildings));
          REQUIRE(h.length_m == doctest::Approx(distance(a, b)));
          REQUIRE(hop_budget(DirectHop{distance(a, b)}, s.radio).feasible);
          continue;
        }
        const auto panel = std::find_if(s.ris_panels.begin(), s.ris_panels.end(),
                                        [&](const RisPanel& r) { return r.id == *h.ris_id; });
        REQUIRE(panel != s.ris_panels.end());
        REQUIRE(line_of_sight(a, panel->mount, s.buildings));
        REQUIRE(line_of_sight(panel->mount, b, s.buildings));
        REQUIRE(dot(a - panel->mount, panel->outward_normal) > 0);
        REQUIRE(dot(b - panel->mount, panel->outward_normal) > 0);
        const HopBudget hb = hop_budget(RisHop{distance(a, panel->mount), distance(panel->mount, b), *panel}, s.radio);
        REQUIRE(hb.feasible);
        REQUIRE(hb.pl_db == doctest::Approx(h.budget.pl_db).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("more panels and more drones never hurt")
{
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario full = random_urban(rng, 4, 3, 2);
    std::vector<Point> targets;
    for (int k = 0; k < 60; ++k) targets.push_back({uniform(rng, -20, 260), uniform(rng, -20, 260)});
    std::vector<CoverageReport> by_panels;
    for (std::size_t r = 0; r <= full.ris_panels.size(); ++r) {
      Scenario s = full;
      s.ris_panels.resize(r);
      by_panels.push_back(coverage_set(s, targets));
    }
    for (std::size_t r = 1; r < by_panels.size(); ++r) {
      for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto& before = by_panels[r - 1].records[k];
        const auto& after = by_panels[r].records[k];
        if (!before.covered) continue;
        REQUIRE(after.covered);
        REQUIRE(after.drone_count <= before.drone_count);
      }
    }
    for (int n = 1; n < 4; ++n) {
      Scenario lo = full, hi = full;
      lo.drone_budget_n = n;
      hi.drone_budget_n = n + 1;
      const auto a = coverage_set(lo, targets), b = coverage_set(hi, targets);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        if (a.records[k].covered) REQUIRE(b.records[k].covered);
      }
    }
  }
}

TEST_CASE("planning is deterministic")
{
  Rng rng(103);
  const Scenario s = random_urban(rng, 4, 2, 3);
  std::vector<Point> targets;
  for (int k = 0; k < 50; ++k) targets.push_back({uniform(rng, -20, 260), uniform(rng, -20, 260)});
  const auto a = coverage_set(s, targets), b = coverage_set(s, targets);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    CHECK(format_path_record(a.records[k]) == format_path_record(b.records[k]));
  }
}
