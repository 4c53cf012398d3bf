#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dronehaul/types.hpp"

namespace dronehaul {

/// One violated invariant, e.g. {"mbs", "position", "inside building B1"}.
struct Issue {
  std::string entity;
  std::string field;
  std::string rule;

  std::string str() const;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

struct LoadResult {
  Scenario scenario;
  std::vector<Issue> issues;
};

/// Parses a scenario document, normalizes footprints (closing vertex dropped,
/// counter-clockwise order) and derives omitted RIS mounts and normals.
/// Throws ParseError on malformed JSON or schema mismatches. Does not
/// validate; see load_scenario.
LoadResult parse_scenario(std::string_view text);

/// parse_scenario followed by validation. Throws ValidationError carrying
/// every issue when any invariant is violated.
Scenario load_scenario(std::string_view text);

Scenario load_scenario_file(const std::string& path);

std::vector<Issue> validate_scenario(const Scenario& s);

/// Inverse of load_scenario: full-precision JSON with every field explicit.
std::string serialize_scenario(const Scenario& s);

/// Outward unit normal of the building edge that hosts the wall, or nullopt
/// when no edge of any building contains both wall endpoints.
struct WallHost {
  std::size_t building;
  std::size_t edge;
  Point outward_normal;
};
std::optional<WallHost> find_wall_host(const Segment& wall, const std::vector<Building>& buildings);

}  // namespace dronehaul
