#pragma once

#include "texrad/scene.hpp"

namespace texrad::fixtures {

// Closed unit box [0,1]^3 (z up, inward normals, 12 triangles) with a downward-facing emissive quad
// of 0.5 x 0.5 hanging below the ceiling (2 triangles). Two materials: "white" and "light".
//
// The UV atlas is a 4x4 grid of 0.25 cells; each face owns one cell inset by 1/64 on every side, so
// islands are 14/64 wide and their borders fall on multiples of 4 texels at 256^2 and 8 at 512^2.
struct BoxOptions {
  double emission = 10.0;
  double albedo = 0.8;
  double light_height = 0.95;
  double light_half_size = 0.25;
};

inline constexpr double kBoxIslandMargin = 1.0 / 64.0;
inline constexpr double kBoxIslandSize = 0.25 - 2 * kBoxIslandMargin;
inline constexpr int kBoxIslandCount = 7;
// Fraction of the unit UV square covered by the atlas.
inline constexpr double kBoxUvCoverage = kBoxIslandCount * kBoxIslandSize * kBoxIslandSize;

Scene box_scene(const BoxOptions& options = {});

// Index of the first triangle of each face in box_scene(): floor, ceiling, x0, x1, y0, y1, light.
enum class BoxFace { floor = 0, ceiling, wall_x0, wall_x1, wall_y0, wall_y1, light };
inline constexpr int first_triangle(BoxFace f) { return 2 * static_cast<int>(f); }

}  // namespace texrad::fixtures
