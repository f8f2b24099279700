#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "texrad/math.hpp"

namespace texrad {

struct Vertex {
  Vec3 position;
  Vec3 normal;
  Vec2 uv;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Material {
  std::string name;
  Rgb albedo;
  Rgb emission;

  friend bool operator==(const Material&, const Material&) = default;
};

struct Triangle {
  Vertex v1, v2, v3;
  int material_index = 0;

  double world_area() const { return 0.5 * length(cross(v2.position - v1.position, v3.position - v1.position)); }
  double uv_area() const { return 0.5 * std::abs(cross(v2.uv - v1.uv, v3.uv - v1.uv)); }
  Aabb bounds() const {
    Aabb b;
    b.extend(v1.position);
    b.extend(v2.position);
    b.extend(v3.position);
    return b;
  }

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

// Immutable after construction; shared read-only by every stage.
class Scene {
 public:
  Scene() = default;
  // Validates every invariant (material indices, non-degenerate triangles, uv range) and computes bounds.
  Scene(std::vector<Triangle> triangles, std::vector<Material> materials);

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Material>& materials() const { return materials_; }
  const Aabb& bounds() const { return bounds_; }
  bool empty() const { return triangles_.empty(); }
  const Material& material_of(const Triangle& t) const { return materials_[t.material_index]; }

 private:
  std::vector<Triangle> triangles_;
  std::vector<Material> materials_;
  Aabb bounds_;
};

enum class SceneFormat { obj_subset };

// Reads `v`, `vt`, `vn`, `f a/b/c a/b/c a/b/c`, `usemtl`, `mtllib`. The material table is a JSON array
// of {name, albedo:[r,g,b], emission:[r,g,b]}; it is named by `mtllib` or defaults to
// `<stem>.materials.json` next to the OBJ.
Scene load_scene(const std::filesystem::path& path, SceneFormat format = SceneFormat::obj_subset);

// Writes the OBJ plus its material JSON (`<stem>.materials.json`) with round-trip precision.
void save_scene(const Scene& scene, const std::filesystem::path& obj_path);

struct UvOverlap {
  int x = 0, y = 0;
  int first_triangle = 0, second_triangle = 0;
};

// Reports every texel claimed by more than one triangle under the texel-center rule.
std::vector<UvOverlap> validate_uv_layout(const Scene& scene, int resolution);
std::vector<UvOverlap> validate_uv_layout(const Scene& scene, int width, int height);

}  // namespace texrad
