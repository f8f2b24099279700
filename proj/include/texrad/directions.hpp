#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "texrad/math.hpp"

namespace texrad {

// Evenly spread hemisphere directions, in insertion order. Every prefix is itself evenly spread.
struct DirectionSet {
  std::vector<Vec2> points;      // unit-disk samples
  std::vector<Vec3> directions;  // (x, y, sqrt(1 - x^2 - y^2)) of each point, z up

  std::size_t size() const { return directions.size(); }
  bool empty() const { return directions.empty(); }
  DirectionSet prefix(std::size_t count) const;
};

inline constexpr int kMaxDirections = 1024;

// One insertion of the largest-empty-circle process.
struct InsertionRecord {
  Vec2 point;
  double clearance = 0;        // distance from the inserted point to its nearest existing point
  std::size_t candidates = 0;  // candidate sites examined
  double runner_up = 0;        // best clearance among the other candidates
};

// Maps a unit-disk point onto the upper hemisphere. Throws for |p| > 1.
Vec3 project_to_hemisphere(Vec2 p);

// Seeds 4 uniform disk points, then repeatedly inserts the Voronoi vertex or Voronoi-edge/boundary
// intersection with the largest clearance. `log`, when given, receives one record per insertion.
DirectionSet generate_directions(int count, std::uint64_t seed, std::vector<InsertionRecord>* log = nullptr);

// Text table: header `rtdirs <count>`, then one `x y z` per line with 9 significant digits.
void write_directions(const DirectionSet& dirs, const std::filesystem::path& path);
DirectionSet read_directions(const std::filesystem::path& path);

}  // namespace texrad
