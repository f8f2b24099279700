#include <doctest.h>

#include "oracles.hpp"
#include "texrad/error.hpp"
#include "texrad/fixtures.hpp"
#include "texrad/texture_group.hpp"

using namespace texrad;

namespace {

Triangle uv_triangle(Vec3 p0, Vec3 p1, Vec3 p2, Vec2 a, Vec2 b, Vec2 c) {
  const Vec3 n = normalize(cross(p1 - p0, p2 - p0));
  return {{p0, n, a}, {p1, n, b}, {p2, n, c}, 0};
}

const std::vector<Material> kGrey{{"grey", {0.5, 0.5, 0.5}, {}}};

}  // namespace

TEST_CASE("empty scene gives an empty texture group") {
  const TextureGroup tg = build_texture_group(Scene{}, 16, 16);
  CHECK(tg.occupied_count() == 0);
  for (float v : tg.pos.data()) CHECK(v == 0.0f);
  for (float v : tg.lig_in.data()) CHECK(v == 0.0f);
}

TEST_CASE("half-square triangle occupies exactly the centers strictly inside it") {
  const Scene s({uv_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0}, {1, 0}, {0, 1})}, kGrey);
  const TextureGroup tg = build_texture_group(s, 64, 64);
  std::size_t expected = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const bool inside = oracle::strictly_inside({(x + 0.5) / 64, (y + 0.5) / 64}, {0, 0}, {1, 0}, {0, 1});
      expected += inside ? 1 : 0;
      CHECK(tg.occupied(x, y) == inside);
    }
  }
  CHECK(tg.occupied_count() == expected);
  CHECK(expected == 2016);
}

TEST_CASE("shared edges are claimed once") {
  // Two triangles splitting the unit square along the diagonal cover every texel exactly once.
  const Scene s({uv_triangle({0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 0}, {1, 0}, {1, 1}),
                 uv_triangle({0, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0}, {1, 1}, {0, 1})},
                kGrey);
  const TextureGroup tg = build_texture_group(s, 32, 32);
  CHECK(tg.occupied_count() == 32 * 32);
}

TEST_CASE("overlapping islands are a data error") {
  const Triangle t = uv_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0}, {1, 0}, {0, 1});
  const Scene s({t, t}, kGrey);
  try {
    build_texture_group(s, 8, 8);
    FAIL("expected an overlap error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(e.code() == "uv-overlap");
  }
}

TEST_CASE("box atlas coverage matches the analytic island area") {
  const TextureGroup tg = build_texture_group(fixtures::box_scene(), 128, 128);
  const double coverage = static_cast<double>(tg.occupied_count()) / (128.0 * 128.0);
  CHECK(std::abs(coverage - fixtures::kBoxUvCoverage) <= 0.02 * fixtures::kBoxUvCoverage);
}

TEST_CASE("patch area formula") {
  // World area 2, uv area 0.5.
  const Triangle t = uv_triangle({0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {0, 0}, {1, 0}, {0, 1});
  CHECK(t.world_area() == doctest::Approx(2.0));
  CHECK(t.uv_area() == doctest::Approx(0.5));
  CHECK(patch_area(t, 64, 64) == doctest::Approx(2.0 / (0.5 * 4096)).epsilon(1e-12));
  CHECK(patch_area(t, 64, 64) == doctest::Approx(9.765625e-4).epsilon(1e-9));
  // patch_area itself does not require uv inside [0, 1], so a uv area of 1 is reachable.
  const Triangle unit = uv_triangle({0, 0, 0}, {2, 0, 0}, {0, 1, 0}, {0, 0}, {2, 0}, {0, 1});
  CHECK(patch_area(unit, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  const Triangle flat_uv = uv_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0}, {1, 0}, {0.5, 0});
  CHECK(patch_area(flat_uv, 16, 16) == 0.0);
}

TEST_CASE("area sums and per-triangle conservation on the box") {
  const Scene s = fixtures::box_scene();
  const TextureGroup tg = build_texture_group(s, 256, 256);
  const auto& tris = s.triangles();
  std::vector<double> sum(tris.size(), 0.0);
  std::vector<std::size_t> count(tris.size(), 0);
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    if (!tg.occupied(i)) continue;
    const auto t = static_cast<std::size_t>(tg.owner[i]);
    sum[t] += tg.area(i);
    ++count[t];
  }
  for (std::size_t t = 0; t < tris.size(); ++t) {
    // Every texel of a triangle stores the same float, so the sum is exact.
    CHECK(sum[t] == static_cast<double>(static_cast<float>(patch_area(tris[t], 256, 256))) * static_cast<double>(count[t]));
  }
  // Floor = triangles 0 and 1, world area 1.
  const double floor_area = sum[0] + sum[1];
  CHECK(std::abs(floor_area - 1.0) <= 0.05);
}

TEST_CASE("positions reproject to their texel centers") {
  const Scene s = fixtures::box_scene();
  const TextureGroup tg = build_texture_group(s, 128, 128);
  double worst = 0;
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    if (!tg.occupied(i)) continue;
    const Triangle& t = s.triangles()[static_cast<std::size_t>(tg.owner[i])];
    // Barycentrics of the stored position from 3D area ratios.
    const Vec3 p = tg.position(i);
    const Vec3 n = cross(t.v2.position - t.v1.position, t.v3.position - t.v1.position);
    const double nn = dot(n, n);
    const double b = dot(cross(p - t.v1.position, t.v3.position - t.v1.position), n) / nn;
    const double c = dot(cross(t.v2.position - t.v1.position, p - t.v1.position), n) / nn;
    const Vec2 uv = t.v1.uv * (1 - b - c) + t.v2.uv * b + t.v3.uv * c;
    const PatchId id = PatchId::from_linear(i, tg.width);
    worst = std::max(worst, length(uv - Vec2{(id.x + 0.5) / 128, (id.y + 0.5) / 128}));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("building twice is bit-identical") {
  const Scene s = fixtures::box_scene();
  const TextureGroup a = build_texture_group(s, 64, 64), b = build_texture_group(s, 64, 64);
  CHECK(a.pos == b.pos);
  CHECK(a.nrm == b.nrm);
  CHECK(a.mat == b.mat);
  CHECK(a.arf == b.arf);
  CHECK(a.emission == b.emission);
  CHECK(a.owner == b.owner);
}

TEST_CASE("sew seams") {
  SUBCASE("single occupied center spreads to its 8 neighbors") {
    TextureGroup tg(3, 3);
    tg.pos.texel(1, 1)[3] = 1.0f;
    const Rgb c{0.25, 0.5, 0.75};
    tg.lig_out.set_rgb(4, c);
    const TextureGroup sewn = sew_seams(tg);
    for (std::size_t i = 0; i < 9; ++i) CHECK(sewn.lig_out.rgb(i) == c);
    CHECK(sewn.occupied_count() == 1);
  }
  SUBCASE("fully occupied map is unchanged") {
    TextureGroup tg(4, 4);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> u(0, 1);
    for (std::size_t i = 0; i < 16; ++i) {
      tg.pos.texel(i)[3] = 1.0f;
      for (int c = 0; c < 4; ++c) tg.lig_out.texel(i)[c] = u(rng);
    }
    CHECK(sew_seams(tg).lig_out == tg.lig_out);
  }
  SUBCASE("box fixture: no black texel borders a patch after one pass, and a second pass is a no-op") {
    TextureGroup tg = build_texture_group(fixtures::box_scene(), 64, 64);
    for (std::size_t i = 0; i < tg.texel_count(); ++i) {
      if (tg.occupied(i)) tg.lig_out.set_rgb(i, {0.3, 0.4, 0.5});
    }
    auto black_border = [](const TextureGroup& g) {
      int n = 0;
      for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
          if (g.occupied(x, y) || g.lig_out.rgb(static_cast<std::size_t>(y) * g.width + x).sum() != 0) continue;
          bool borders = false;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = x + dx, ny = y + dy;
              if (nx >= 0 && ny >= 0 && nx < g.width && ny < g.height && g.occupied(nx, ny)) borders = true;
            }
          }
          n += borders ? 1 : 0;
        }
      }
      return n;
    };
    CHECK(black_border(tg) > 0);
    const TextureGroup once = sew_seams(tg);
    CHECK(black_border(once) == 0);
    CHECK(sew_seams(once).lig_out == once.lig_out);
  }
}
