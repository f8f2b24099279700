#include "texrad/fixtures.hpp"

namespace texrad::fixtures {

namespace {

struct Face {
  Vec3 origin, s_axis, t_axis, normal;
  int cell_x, cell_y;
  int material;
};

void emit_quad(const Face& f, std::vector<Triangle>& out) {
  const Vec2 uv0{f.cell_x * 0.25 + kBoxIslandMargin, f.cell_y * 0.25 + kBoxIslandMargin};
  auto vertex = [&](double s, double t) {
    return Vertex{f.origin + f.s_axis * s + f.t_axis * t, f.normal, uv0 + Vec2{s, t} * kBoxIslandSize};
  };
  out.push_back({vertex(0, 0), vertex(1, 0), vertex(1, 1), f.material});
  out.push_back({vertex(0, 0), vertex(1, 1), vertex(0, 1), f.material});
}

}  // namespace

Scene box_scene(const BoxOptions& o) {
  const double lo = 0.5 - o.light_half_size;
  const double span = 2 * o.light_half_size;
  const Face faces[] = {
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 0, 0, 0},   // floor
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}, 1, 0, 0},  // ceiling
      {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}, 2, 0, 0},   // x = 0
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, 3, 0, 0},  // x = 1
      {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}, 0, 1, 0},   // y = 0
      {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, {0, -1, 0}, 1, 1, 0},  // y = 1
      {{lo, lo, o.light_height}, {span, 0, 0}, {0, span, 0}, {0, 0, -1}, 2, 1, 1},
  };
  std::vector<Triangle> tris;
  for (const Face& f : faces) emit_quad(f, tris);
  std::vector<Material> mats = {
      {"white", {o.albedo, o.albedo, o.albedo}, {0, 0, 0}},
      {"light", {o.albedo, o.albedo, o.albedo}, {o.emission, o.emission, o.emission}},
  };
  return Scene(std::move(tris), std::move(mats));
}

}  // namespace texrad::fixtures
