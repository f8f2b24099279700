#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "texrad/math.hpp"
#include "texrad/scene.hpp"

namespace texrad {

// Row-major float image with interleaved channels.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels)
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<std::size_t>(width) * height * channels, 0.0f) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t texel_count() const { return static_cast<std::size_t>(width_) * height_; }

  float* texel(int x, int y) { return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_; }
  const float* texel(int x, int y) const {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }
  float* texel(std::size_t linear) { return data_.data() + linear * channels_; }
  const float* texel(std::size_t linear) const { return data_.data() + linear * channels_; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  Rgb rgb(std::size_t linear) const {
    const float* p = texel(linear);
    return {p[0], p[1], p[2]};
  }
  void set_rgb(std::size_t linear, Rgb c) {
    float* p = texel(linear);
    p[0] = static_cast<float>(c.r);
    p[1] = static_cast<float>(c.g);
    p[2] = static_cast<float>(c.b);
  }
  Vec3 vec3(std::size_t linear) const {
    const float* p = texel(linear);
    return {p[0], p[1], p[2]};
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0, height_ = 0, channels_ = 0;
  std::vector<float> data_;
};

struct PatchId {
  int x = 0, y = 0;
  std::size_t linear = 0;

  static PatchId from_xy(int x, int y, int width) {
    return {x, y, static_cast<std::size_t>(x) + static_cast<std::size_t>(y) * width};
  }
  static PatchId from_linear(std::size_t linear, int width) {
    return {static_cast<int>(linear % width), static_cast<int>(linear / width), linear};
  }
  friend bool operator==(PatchId a, PatchId b) { return a.linear == b.linear; }
};

// Co-registered UV-space maps that hold the whole solver state.
//   pos:      xyz world position, alpha = occupancy (0 or 1)
//   nrm:      unit world normal
//   mat:      albedo
//   arf:      world area of the patch
//   emission: emitted radiosity
//   lig_in / lig_out: radiosity RGB; alpha of lig_in carries quad-tree weights
struct TextureGroup {
  int width = 0, height = 0;
  Image pos, nrm, mat, arf, emission, lig_in, lig_out;
  // Index of the triangle that rasterized each texel, -1 where unoccupied.
  std::vector<int> owner;

  TextureGroup() = default;
  TextureGroup(int w, int h);

  std::size_t texel_count() const { return static_cast<std::size_t>(width) * height; }
  bool occupied(std::size_t linear) const { return pos.texel(linear)[3] > 0.0f; }
  bool occupied(int x, int y) const { return pos.texel(x, y)[3] > 0.0f; }
  std::size_t occupied_count() const;
  // Linear indices of every occupied texel, ascending.
  std::vector<std::size_t> occupied_patches() const;

  Vec3 position(std::size_t i) const { return pos.vec3(i); }
  Vec3 normal(std::size_t i) const { return nrm.vec3(i); }
  double area(std::size_t i) const { return arf.texel(i)[0]; }

  // Resets both lighting maps to the emission map; lig_in alpha becomes the occupancy flag.
  void reset_lighting();
};

// World area of one patch of `triangle` at the given resolution: A_world / (A_uv * n).
// Zero-UV-area triangles yield 0 and rasterize no patches.
double patch_area(const Triangle& triangle, int width, int height);

// Rasterizes every triangle into UV space with the texel-center rule. Throws a data error naming the
// texel if two triangles claim the same texel.
TextureGroup build_texture_group(const Scene& scene, int width, int height);

// Copies lig_out onto unoccupied texels bordering occupied ones (8-neighborhood, first occupied
// neighbor in row-major order). Occupancy is unchanged, so sewn texels never act as patches.
TextureGroup sew_seams(const TextureGroup& tg);

// The same seam pass applied to a bare RGB(A) image guided by an occupancy mask.
Image sew_seams(const Image& lighting, const TextureGroup& tg);

}  // namespace texrad
