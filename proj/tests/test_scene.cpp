#include <doctest.h>

#include <fstream>
#include <functional>

#include "oracles.hpp"
#include "texrad/error.hpp"
#include "texrad/fixtures.hpp"
#include "texrad/scene.hpp"

using namespace texrad;

namespace {

const char* kMaterials = R"([{"name": "white", "albedo": [0.5, 0.5, 0.5], "emission": [0, 0, 0]}])";

std::filesystem::path write_obj(const std::filesystem::path& dir, const std::string& body) {
  std::ofstream(dir / "s.materials.json") << kMaterials;
  const auto path = dir / "s.obj";
  std::ofstream(path) << body;
  return path;
}

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("single triangle loads with its bounds") {
  const auto dir = oracle::temp_dir("scene_single");
  const auto path = write_obj(dir,
                              "v 0 0 0\nv 2 0 0\nv 0 3 1\n"
                              "vt 0 0\nvt 1 0\nvt 0 1\n"
                              "vn 0 0 2\n"
                              "usemtl white\n"
                              "f 1/1/1 2/2/1 3/3/1\n");
  const Scene s = load_scene(path);
  REQUIRE(s.triangles().size() == 1);
  CHECK(s.bounds().lo == Vec3{0, 0, 0});
  CHECK(s.bounds().hi == Vec3{2, 3, 1});
  // vn records are normalized on load.
  CHECK(length(s.triangles()[0].v1.normal) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.triangles()[0].v3.uv == Vec2{0, 1});
}

TEST_CASE("negative indices resolve relative to the end") {
  const auto dir = oracle::temp_dir("scene_negative");
  const Scene s = load_scene(write_obj(dir,
                                       "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nvn 0 0 1\n"
                                       "usemtl white\nf -3/-3/-1 -2/-2/-1 -1/-1/-1\n"));
  CHECK(s.triangles()[0].v2.position == Vec3{1, 0, 0});
}

TEST_CASE("loader rejects malformed input with structured errors") {
  const auto dir = oracle::temp_dir("scene_errors");
  const std::string verts = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nvt 1 1\nvn 0 0 1\nusemtl white\n";
  CHECK(error_code([&] { load_scene(write_obj(dir, verts + "f 1/1/1 2/2/1 4/4/1 3/3/1\n")); }) == "non-triangle-face");
  CHECK(error_code([&] { load_scene(write_obj(dir, verts + "f 1//1 2//1 3//1\n")); }) == "missing-uv");
  CHECK(error_code([&] { load_scene(write_obj(dir, verts + "f 1/1 2/2 3/3\n")); }) == "missing-normal");
  CHECK(error_code([&] { load_scene(write_obj(dir, verts + "f 1/1/1 2/2/1 9/3/1\n")); }) == "bad-index");
  CHECK(error_code([&] { load_scene(write_obj(dir, "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 2\nvn 0 0 1\n"
                                                   "usemtl white\nf 1/1/1 2/2/1 3/3/1\n")); }) == "uv-range");
  CHECK(error_code([&] { load_scene(write_obj(dir, verts + "usemtl nope\nf 1/1/1 2/2/1 3/3/1\n")); }) == "bad-material");
  CHECK(error_code([&] { load_scene(write_obj(dir, "v 0 0 0\nv 1 0 0\nv 2 0 0\nvt 0 0\nvt 1 0\nvt 0 1\nvn 0 0 1\n"
                                                   "usemtl white\nf 1/1/1 2/2/1 3/3/1\n")); }) == "degenerate-triangle");
  CHECK(error_code([&] { load_scene(write_obj(dir, verts)); }) == "empty-scene");
  CHECK(error_code([&] { load_scene(dir / "missing.obj"); }) == "unreadable-file");
}

TEST_CASE("box fixture has 14 triangles and 2 materials") {
  const Scene s = fixtures::box_scene();
  CHECK(s.triangles().size() == 14);
  CHECK(s.materials().size() == 2);
  const Scene loaded = load_scene(TEXRAD_DATA_DIR "/box.obj");
  CHECK(loaded.triangles() == s.triangles());
  CHECK(loaded.materials() == s.materials());
}

TEST_CASE("save and reload is the identity") {
  const auto dir = oracle::temp_dir("scene_roundtrip");
  std::mt19937_64 rng(3);
  const Scene soup = oracle::random_soup(50, 0.1, rng);
  save_scene(soup, dir / "soup.obj");
  const Scene back = load_scene(dir / "soup.obj");
  CHECK(back.triangles() == soup.triangles());
  CHECK(back.materials() == soup.materials());
  CHECK(back.bounds() == soup.bounds());
}

TEST_CASE("bounds enclose every vertex and normals are unit length") {
  std::mt19937_64 rng(11);
  const Scene s = oracle::random_soup(200, 0.2, rng);
  for (const auto& t : s.triangles()) {
    for (const Vertex* v : {&t.v1, &t.v2, &t.v3}) {
      CHECK(s.bounds().contains(v->position));
      CHECK(std::abs(length(v->normal) - 1.0) < 1e-5);
    }
  }
}

TEST_CASE("uv layout validation") {
  auto tri = [](Vec2 a, Vec2 b, Vec2 c) {
    Triangle t;
    t.v1 = {{0, 0, 0}, {0, 0, 1}, a};
    t.v2 = {{1, 0, 0}, {0, 0, 1}, b};
    t.v3 = {{0, 1, 0}, {0, 0, 1}, c};
    return t;
  };
  const std::vector<Material> mats{{"m", {0.5, 0.5, 0.5}, {}}};
  SUBCASE("disjoint quadrants") {
    const Scene s({tri({0, 0}, {0.5, 0}, {0, 0.5}), tri({0.5, 0.5}, {1, 0.5}, {0.5, 1})}, mats);
    CHECK(validate_uv_layout(s, 64).empty());
  }
  SUBCASE("identical islands overlap") {
    const Scene s({tri({0, 0}, {0.5, 0}, {0, 0.5}), tri({0, 0}, {0.5, 0}, {0, 0.5})}, mats);
    const auto r = validate_uv_layout(s, 64);
    REQUIRE(!r.empty());
    CHECK(r.front().first_triangle == 0);
    CHECK(r.front().second_triangle == 1);
  }
  SUBCASE("box atlas at 128 has no overlaps, confirmed by a texel scan") {
    const Scene s = fixtures::box_scene();
    CHECK(validate_uv_layout(s, 128).empty());
    int claims_max = 0;
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) {
        const Vec2 c{(x + 0.5) / 128, (y + 0.5) / 128};
        int claims = 0;
        for (const auto& t : s.triangles()) claims += oracle::strictly_inside(c, t.v1.uv, t.v2.uv, t.v3.uv) ? 1 : 0;
        claims_max = std::max(claims_max, claims);
      }
    }
    CHECK(claims_max <= 1);
  }
}
