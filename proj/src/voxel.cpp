#include "texrad/voxel.hpp"

#include <bit>
#include <fstream>

#include "texrad/error.hpp"
#include "texrad/raster.hpp"

namespace texrad {

VoxelMap::VoxelMap(int resolution, const Aabb& world)
    : resolution_(resolution), world_(world),
      bits_((static_cast<std::size_t>(resolution) * resolution * resolution + 63) / 64, 0) {
  const Vec3 e = world.extent();
  for (int a = 0; a < 3; ++a) scale_[a] = e[a] > 0 ? resolution / e[a] : 0.0;
}

Vec3 VoxelMap::to_grid(Vec3 p) const {
  const Vec3 d = p - world_.lo;
  return {d.x * scale_.x, d.y * scale_.y, d.z * scale_.z};
}

Vec3 VoxelMap::cell_size() const {
  const Vec3 e = world_.extent();
  return e / static_cast<double>(resolution_);
}

bool VoxelMap::get(int x, int y, int z) const {
  const std::size_t i = index(x, y, z);
  return (bits_[i >> 6] >> (i & 63)) & 1u;
}

void VoxelMap::set(int x, int y, int z) {
  const std::size_t i = index(x, y, z);
  bits_[i >> 6] |= std::uint64_t{1} << (i & 63);
}

std::size_t VoxelMap::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

namespace {

Aabb widen_flat_axes(Aabb b) {
  const Vec3 e = b.extent();
  const double widest = std::max({e.x, e.y, e.z});
  for (int a = 0; a < 3; ++a) {
    if (e[a] <= 0) {
      const double c = 0.5 * (b.lo[a] + b.hi[a]);
      b.lo[a] = c - 0.5 * widest;
      b.hi[a] = c + 0.5 * widest;
    }
  }
  return b;
}

int clamp_cell(double g, int r) { return std::clamp(static_cast<int>(std::floor(g)), 0, r - 1); }

}  // namespace

VoxelMap voxelize(const Scene& scene, int resolution) { return voxelize(scene, resolution, scene.bounds()); }

VoxelMap voxelize(const Scene& scene, int resolution, const Aabb& world) {
  if (resolution < 2 || resolution > 512) fail_usage("bad-resolution", "voxel resolution must be in [2, 512]");
  if (scene.empty()) fail_usage("empty-scene", "cannot voxelize an empty scene");
  VoxelMap vm(resolution, widen_flat_axes(world));
  const int r = resolution;
  auto mark = [&](Vec3 g) { vm.set(clamp_cell(g.x, r), clamp_cell(g.y, r), clamp_cell(g.z, r)); };

  for (const Triangle& t : scene.triangles()) {
    const Vec3 g[3] = {vm.to_grid(t.v1.position), vm.to_grid(t.v2.position), vm.to_grid(t.v3.position)};
    Vec3 n = cross(g[1] - g[0], g[2] - g[0]);
    n = {std::abs(n.x), std::abs(n.y), std::abs(n.z)};
    // Permutation that moves the dominant normal axis onto z: xyz <- zyx, xzy, or xyz.
    int axes[3] = {0, 1, 2};
    if (n.x >= n.y && n.x >= n.z) {
      axes[0] = 2;
      axes[2] = 0;
    } else if (n.y >= n.z) {
      axes[1] = 2;
      axes[2] = 1;
    }
    auto project = [&](Vec3 p) { return Vec2{p[axes[0]], p[axes[1]]}; };
    rasterize_triangle(project(g[0]), project(g[1]), project(g[2]), r, r, [&](int, int, double a, double b, double c) {
      mark(g[0] * a + g[1] * b + g[2] * c);
    });
    for (const Vec3& p : g) mark(p);
  }
  return vm;
}

bool raymarch_occluded(const VoxelMap& vm, Vec3 a, Vec3 b, double step_scale) {
  if (!(step_scale > 0 && step_scale <= 1)) fail_usage("bad-step", "step_scale must be in (0, 1]");
  const Vec3 ga = vm.to_grid(a), gb = vm.to_grid(b);
  const Vec3 d = gb - ga;
  const double len = length(d);
  if (len <= 2.0) return false;
  const Vec3 dir = d / len;
  const Vec3 mid = (ga + gb) * 0.5;
  const int r = vm.resolution();
  constexpr double kEndpointExclusion = 1.0;

  auto solid = [&](Vec3 p) {
    if (length(p - ga) < kEndpointExclusion || length(p - gb) < kEndpointExclusion) return false;
    const int x = static_cast<int>(std::floor(p.x)), y = static_cast<int>(std::floor(p.y)),
              z = static_cast<int>(std::floor(p.z));
    if (x < 0 || y < 0 || z < 0 || x >= r || y >= r || z >= r) {
      // Points on the far boundary belong to the last cell.
      return vm.get(std::clamp(x, 0, r - 1), std::clamp(y, 0, r - 1), std::clamp(z, 0, r - 1));
    }
    return vm.get(x, y, z);
  };

  if (solid(mid)) return true;
  const double half = 0.5 * len;
  for (int k = 1;; ++k) {
    const double t = k * step_scale;
    if (t >= half) break;
    const Vec3 off = dir * t;
    if (solid(mid + off) || solid(mid - off)) return true;
  }
  return false;
}

void write_rvox(const VoxelMap& vm, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_data("unwritable-file", "cannot write " + path.string());
  const std::uint32_t r = static_cast<std::uint32_t>(vm.resolution());
  const unsigned char header[8] = {'R', 'V', 'O', 'X', static_cast<unsigned char>(r & 0xff),
                                    static_cast<unsigned char>((r >> 8) & 0xff), static_cast<unsigned char>((r >> 16) & 0xff),
                                    static_cast<unsigned char>((r >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  const std::size_t cells = static_cast<std::size_t>(r) * r * r;
  std::vector<unsigned char> bytes((cells + 7) / 8, 0);
  for (std::size_t i = 0; i < cells; ++i) {
    if ((vm.words()[i >> 6] >> (i & 63)) & 1u) bytes[i >> 3] |= static_cast<unsigned char>(1u << (i & 7));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace texrad
