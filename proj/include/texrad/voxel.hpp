#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "texrad/math.hpp"
#include "texrad/scene.hpp"

namespace texrad {

// Binary r x r x r occupancy grid over an axis-aligned world box.
class VoxelMap {
 public:
  VoxelMap() = default;
  VoxelMap(int resolution, const Aabb& world);

  int resolution() const { return resolution_; }
  const Aabb& world() const { return world_; }

  // World position to continuous grid coordinates; world.lo maps to (0,0,0) and world.hi to (r,r,r).
  Vec3 to_grid(Vec3 p) const;
  // Size of one cell along each world axis.
  Vec3 cell_size() const;

  bool get(int x, int y, int z) const;
  void set(int x, int y, int z);
  std::size_t count() const;
  const std::vector<std::uint64_t>& words() const { return bits_; }

  friend bool operator==(const VoxelMap&, const VoxelMap&) = default;

 private:
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * resolution_ + y) * resolution_ + x;
  }

  int resolution_ = 0;
  Aabb world_;
  Vec3 scale_;  // grid units per world unit
  std::vector<std::uint64_t> bits_;
};

// Voxelizes with dominant-axis selection: each triangle is swizzled so its normal's largest component
// lies on z, rasterized over x/y cell centers, and each fragment sets the cell at its unswizzled
// position. The cells holding the vertices are set as well, so sub-cell triangles are never lost.
// Axes with zero world extent are widened to the largest extent, centered on the geometry.
VoxelMap voxelize(const Scene& scene, int resolution);
VoxelMap voxelize(const Scene& scene, int resolution, const Aabb& world);

// Marches from the segment midpoint outward in both directions with steps of step_scale cells and
// reports whether any sample lands in a set cell. Samples closer than one cell to either endpoint
// are skipped, which keeps the surfaces the endpoints lie on from occluding themselves.
bool raymarch_occluded(const VoxelMap& vm, Vec3 a, Vec3 b, double step_scale = 0.5);

// `RVOX`, u32 LE resolution, then ceil(r^3 / 8) bytes, x fastest, least significant bit first.
void write_rvox(const VoxelMap& vm, const std::filesystem::path& path);

}  // namespace texrad
