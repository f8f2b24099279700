#include "texrad/texture_group.hpp"

#include <string>

#include "texrad/error.hpp"
#include "texrad/raster.hpp"

namespace texrad {

TextureGroup::TextureGroup(int w, int h)
    : width(w), height(h), pos(w, h, 4), nrm(w, h, 3), mat(w, h, 3), arf(w, h, 1), emission(w, h, 3),
      lig_in(w, h, 4), lig_out(w, h, 4), owner(static_cast<std::size_t>(w) * h, -1) {}

std::size_t TextureGroup::occupied_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < texel_count(); ++i) n += occupied(i) ? 1 : 0;
  return n;
}

std::vector<std::size_t> TextureGroup::occupied_patches() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < texel_count(); ++i) {
    if (occupied(i)) out.push_back(i);
  }
  return out;
}

void TextureGroup::reset_lighting() {
  for (std::size_t i = 0; i < texel_count(); ++i) {
    const float* e = emission.texel(i);
    const float occ = pos.texel(i)[3];
    for (Image* lig : {&lig_in, &lig_out}) {
      float* l = lig->texel(i);
      l[0] = e[0];
      l[1] = e[1];
      l[2] = e[2];
      l[3] = occ;
    }
  }
}

double patch_area(const Triangle& triangle, int width, int height) {
  const double uv_area = triangle.uv_area();
  if (!(uv_area > 0)) return 0.0;
  const double n = static_cast<double>(width) * height;
  return triangle.world_area() / (uv_area * n);
}

TextureGroup build_texture_group(const Scene& scene, int width, int height) {
  if (width < 1 || height < 1) fail_usage("bad-resolution", "resolution must be >= 1");
  TextureGroup tg(width, height);
  const auto& tris = scene.triangles();
  for (std::size_t ti = 0; ti < tris.size(); ++ti) {
    const Triangle& t = tris[ti];
    const float area = static_cast<float>(patch_area(t, width, height));
    if (area <= 0.0f) continue;
    const Material& m = scene.material_of(t);
    auto to_px = [&](Vec2 uv) { return Vec2{uv.x * width, uv.y * height}; };
    rasterize_triangle(
        to_px(t.v1.uv), to_px(t.v2.uv), to_px(t.v3.uv), width, height, [&](int x, int y, double a, double b, double c) {
          const std::size_t i = static_cast<std::size_t>(y) * width + x;
          if (tg.owner[i] >= 0) {
            fail_data("uv-overlap", "triangles " + std::to_string(tg.owner[i]) + " and " + std::to_string(ti) +
                                        " both cover texel (" + std::to_string(x) + ", " + std::to_string(y) + ")");
          }
          tg.owner[i] = static_cast<int>(ti);
          const Vec3 p = t.v1.position * a + t.v2.position * b + t.v3.position * c;
          const Vec3 n = normalize(t.v1.normal * a + t.v2.normal * b + t.v3.normal * c);
          float* pp = tg.pos.texel(i);
          pp[0] = static_cast<float>(p.x);
          pp[1] = static_cast<float>(p.y);
          pp[2] = static_cast<float>(p.z);
          pp[3] = 1.0f;
          float* pn = tg.nrm.texel(i);
          pn[0] = static_cast<float>(n.x);
          pn[1] = static_cast<float>(n.y);
          pn[2] = static_cast<float>(n.z);
          tg.mat.set_rgb(i, m.albedo);
          tg.emission.set_rgb(i, m.emission);
          tg.arf.texel(i)[0] = area;
        });
  }
  tg.reset_lighting();
  return tg;
}

Image sew_seams(const Image& lighting, const TextureGroup& tg) {
  Image out = lighting;
  const int w = tg.width, h = tg.height;
  const int channels = lighting.channels();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (tg.occupied(x, y)) continue;
      bool found = false;
      for (int dy = -1; dy <= 1 && !found; ++dy) {
        for (int dx = -1; dx <= 1 && !found; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h || !tg.occupied(nx, ny)) continue;
          const float* src = lighting.texel(nx, ny);
          float* dst = out.texel(x, y);
          for (int c = 0; c < std::min(channels, 3); ++c) dst[c] = src[c];
          found = true;
        }
      }
    }
  }
  return out;
}

TextureGroup sew_seams(const TextureGroup& tg) {
  TextureGroup out = tg;
  out.lig_out = sew_seams(tg.lig_out, tg);
  return out;
}

}  // namespace texrad
