#include <doctest.h>

#include "oracles.hpp"
#include "texrad/bvh.hpp"
#include "texrad/fixtures.hpp"

using namespace texrad;
using oracle::boundary_case;
using oracle::random_point;
using oracle::random_unit;

namespace {

Triangle flat(Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 n = normalize(cross(b - a, c - a));
  return {{a, n, {0, 0}}, {b, n, {1, 0}}, {c, n, {0, 1}}, 0};
}

Scene scene_of(std::vector<Triangle> tris) { return Scene(std::move(tris), {{"m", {0.5, 0.5, 0.5}, {}}}); }

void check_tree_invariants(const Bvh& bvh, std::size_t triangles) {
  const auto& nodes = bvh.nodes();
  std::vector<int> seen(triangles, 0);
  for (const auto& n : nodes) {
    if (n.leaf()) {
      for (int k = n.first; k < n.first + n.count; ++k) ++seen[static_cast<std::size_t>(bvh.triangle_order()[k])];
    } else {
      CHECK(n.bounds.contains(nodes[n.left].bounds));
      CHECK(n.bounds.contains(nodes[n.right].bounds));
    }
  }
  for (int c : seen) CHECK(c == 1);
  CHECK(bvh.depth() <= 2 * std::log2(static_cast<double>(std::max<std::size_t>(triangles, 1))) + 32);
}

}  // namespace

TEST_CASE("bvh structure") {
  SUBCASE("one triangle is a single leaf") {
    const Scene s = scene_of({flat({0, 0, 0}, {1, 0, 0}, {0, 2, 1})});
    const Bvh bvh = build_bvh(s);
    REQUIRE(bvh.nodes().size() == 1);
    CHECK(bvh.nodes()[0].leaf());
    CHECK(bvh.bounds() == s.triangles()[0].bounds());
  }
  SUBCASE("two far-apart triangles split into disjoint children") {
    const Scene s = scene_of({flat({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), flat({10, 0, 0}, {11, 0, 0}, {10, 1, 0})});
    const Bvh bvh = build_bvh(s, 1);
    const auto& root = bvh.nodes()[0];
    REQUIRE(!root.leaf());
    const Aabb& l = bvh.nodes()[root.left].bounds;
    const Aabb& r = bvh.nodes()[root.right].bounds;
    CHECK((l.hi.x < r.lo.x || r.hi.x < l.lo.x));
  }
  SUBCASE("random soups satisfy every structural invariant") {
    std::mt19937_64 rng(1);
    for (int count : {3, 100, 1000}) {
      const Scene s = oracle::random_soup(count, 0.05, rng);
      check_tree_invariants(build_bvh(s), s.triangles().size());
    }
  }
  SUBCASE("150k triangles stay within the depth bound") {
    std::mt19937_64 rng(2);
    const Scene s = oracle::random_soup(150000, 0.004, rng);
    const Bvh bvh = build_bvh(s);
    check_tree_invariants(bvh, s.triangles().size());
  }
  SUBCASE("construction is deterministic") {
    std::mt19937_64 rng(3);
    const Scene s = oracle::random_soup(500, 0.05, rng);
    const Bvh a = build_bvh(s), b = build_bvh(s);
    CHECK(a.triangle_order() == b.triangle_order());
    REQUIRE(a.nodes().size() == b.nodes().size());
    for (std::size_t i = 0; i < a.nodes().size(); ++i) CHECK(a.nodes()[i].bounds == b.nodes()[i].bounds);
  }
}

TEST_CASE("intersect_triangle examples") {
  const Triangle t = flat({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const auto h = intersect_triangle(Ray{{0, 0, -1}, {0, 0, 1}, 0, INFINITY}, t);
  REQUIRE(h);
  CHECK(h->t == doctest::Approx(1.0));
  CHECK(h->u == doctest::Approx(0.0));
  CHECK(h->v == doctest::Approx(0.0));
  const auto c = intersect_triangle(Ray{{1.0 / 3, 1.0 / 3, -1}, {0, 0, 1}, 0, INFINITY}, t);
  REQUIRE(c);
  CHECK(c->t == doctest::Approx(1.0));
  CHECK(c->u == doctest::Approx(1.0 / 3));
  CHECK(c->v == doctest::Approx(1.0 / 3));
  // Parallel ray, ray behind the interval, ray past the edge.
  CHECK(!intersect_triangle(Ray{{0.2, 0.2, 1}, {1, 0, 0}, 0, INFINITY}, t));
  CHECK(!intersect_triangle(Ray{{0.2, 0.2, -1}, {0, 0, 1}, 0, 0.5}, t));
  CHECK(!intersect_triangle(Ray{{0.8, 0.8, -1}, {0, 0, 1}, 0, INFINITY}, t));
  // Both faces are hit (no culling).
  CHECK(intersect_triangle(Ray{{0.2, 0.2, 1}, {0, 0, -1}, 0, INFINITY}, t));
}

TEST_CASE("Moller-Trumbore matches the plane and area-ratio oracle on 10k random pairs") {
  std::mt19937_64 rng(42);
  int hits = 0, compared = 0;
  for (int k = 0; k < 10000; ++k) {
    const Vec3 a = random_point(rng), b = random_point(rng), c = random_point(rng);
    if (length(cross(b - a, c - a)) < 1e-3) continue;
    const Triangle t = flat(a, b, c);
    // Aim near the triangle so that both hits and misses occur.
    std::uniform_real_distribution<double> w(-0.3, 1.0);
    const double wb = w(rng), wc = w(rng);
    const Vec3 target = a + (b - a) * wb + (c - a) * wc;
    const Vec3 o = random_point(rng, -1.0, 2.0);
    const Vec3 d = normalize(target - o);
    const Ray ray{o, d, 0, INFINITY};
    const auto got = intersect_triangle(ray, t);
    const auto want = oracle::plane_hit(o, d, a, b, c);
    if (!want) continue;
    const double w0 = 1 - want->u - want->v;
    if (std::min({std::abs(want->u), std::abs(want->v), std::abs(w0), std::abs(want->t)}) < 1e-9) continue;
    ++compared;
    const bool expect = oracle::plane_hit_inside(*want) && want->t >= 0;
    REQUIRE(got.has_value() == expect);
    if (!got) continue;
    ++hits;
    CHECK(std::abs(got->t - want->t) < 1e-6);
    CHECK(std::abs(got->u - want->u) < 1e-6);
    CHECK(std::abs(got->v - want->v) < 1e-6);
    // Reconstruction bound of the hit contract.
    const Vec3 p = o + d * got->t;
    const Vec3 q = a * (1 - got->u - got->v) + b * got->u + c * got->v;
    CHECK(length(p - q) < 1e-5);
  }
  CHECK(compared > 9000);
  CHECK(hits > 1000);
}

TEST_CASE("occluded basics") {
  const Bvh empty = build_bvh(Scene{});
  CHECK(!occluded(empty, {0, 0, 0}, {1, 1, 1}, 1e-4));
  CHECK(!empty.closest_hit(Ray{{0, 0, 0}, {0, 0, 1}, 0, INFINITY}));

  // A wall spanning x = 0.5 over [-1, 2]^2.
  const Scene wall = scene_of({flat({0.5, -1, -1}, {0.5, 2, -1}, {0.5, 2, 2}), flat({0.5, -1, -1}, {0.5, 2, 2}, {0.5, -1, 2})});
  const Bvh bvh = build_bvh(wall);
  CHECK(occluded(bvh, {0, 0.3, 0.3}, {1, 0.7, 0.2}, 1e-4));
  CHECK(occluded(bvh, {1, 0.7, 0.2}, {0, 0.3, 0.3}, 1e-4));
  CHECK(!occluded(bvh, {0, 0.3, 0.3}, {0.4, 0.7, 0.2}, 1e-4));
  // Degenerate pairs are mutually visible.
  CHECK(!occluded(bvh, {0.5, 0, 0}, {0.5, 0, 0}, 1e-4));
  CHECK(!occluded(bvh, {0.49995, 0, 0}, {0.50005, 0, 0}, 1e-4));
}

TEST_CASE("closest hit picks the nearer of two stacked triangles and misses cleanly") {
  const Scene s = scene_of({flat({0, 0, 2}, {1, 0, 2}, {0, 1, 2}), flat({0, 0, 1}, {1, 0, 1}, {0, 1, 1})});
  const Bvh bvh = build_bvh(s);
  const auto h = bvh.closest_hit(Ray{{0.2, 0.2, 0}, {0, 0, 1}, 0, INFINITY});
  REQUIRE(h);
  CHECK(h->triangle_index == 1);
  CHECK(h->t == doctest::Approx(1.0));
  CHECK(!bvh.closest_hit(Ray{{0.2, 0.2, 0}, {0, 0, -1}, 0, INFINITY}));
  CHECK(!bvh.closest_hit(Ray{{5, 5, 0}, {0, 0, 1}, 0, INFINITY}));
}

TEST_CASE("bvh queries agree with the linear scan on random soups and the box") {
  std::mt19937_64 rng(7);
  std::vector<Scene> scenes;
  scenes.push_back(fixtures::box_scene());
  for (int count : {100, 400, 1000}) scenes.push_back(oracle::random_soup(count, 0.08, rng));
  for (const Scene& s : scenes) {
    const Bvh bvh = build_bvh(s);
    const double eps = default_epsilon(s);
    int occ_checked = 0, hit_checked = 0, occ_true = 0;
    for (int q = 0; q < 10000; ++q) {
      const Vec3 a = random_point(rng, 0.01, 0.99), b = random_point(rng, 0.01, 0.99);
      const double dist = length(b - a);
      const Vec3 d = (b - a) / dist;
      // Occlusion.
      if (!boundary_case(s, a, d, eps, dist - 2 * eps, 2 * eps)) {
        bool expect = false;
        for (double t : oracle::all_hits(s, a, d)) expect = expect || (t >= eps && t <= dist - 2 * eps);
        REQUIRE(occluded(bvh, a, b, eps) == expect);
        const OcclusionProbe probe(bvh, a, eps);
        REQUIRE(probe.occluded(b) == expect);
        occ_true += expect ? 1 : 0;
        ++occ_checked;
        // Symmetry, when the mirrored query is also clear of the boundary.
        if (!boundary_case(s, b, -d, eps, dist - 2 * eps, 2 * eps)) CHECK(occluded(bvh, b, a, eps) == expect);
      }
      // Closest hit along a random direction.
      const Vec3 dir = random_unit(rng);
      if (!boundary_case(s, a, dir, eps, 1e9, 2 * eps)) {
        const auto want = oracle::linear_closest(s, a, dir, eps, INFINITY);
        const auto got = bvh.closest_hit(Ray{a, dir, eps, INFINITY});
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
          CHECK(got->t == doctest::Approx(want->t).epsilon(1e-9));
          CHECK(got->triangle_index == want->triangle);
        }
        ++hit_checked;
      }
    }
    CHECK(occ_checked > 9000);
    CHECK(hit_checked > 9000);
    CHECK(occ_true > 0);
  }
}

TEST_CASE("shrinking the interval never adds hits") {
  std::mt19937_64 rng(9);
  const Scene s = oracle::random_soup(300, 0.08, rng);
  const Bvh bvh = build_bvh(s);
  std::uniform_real_distribution<double> u(0, 1);
  for (int q = 0; q < 5000; ++q) {
    const Vec3 o = random_point(rng);
    const Vec3 d = random_unit(rng);
    const double t0 = u(rng) * 0.5, t1 = t0 + u(rng);
    const double s0 = t0 + (t1 - t0) * u(rng) * 0.5, s1 = t1 - (t1 - s0) * u(rng) * 0.5;
    const bool outer = bvh.any_hit(Ray{o, d, t0, t1});
    const bool inner = bvh.any_hit(Ray{o, d, s0, s1});
    CHECK((!inner || outer));
    const auto h = bvh.closest_hit(Ray{o, d, t0, t1});
    CHECK(h.has_value() == outer);
    if (h) {
      CHECK(h->t >= t0);
      CHECK(h->t <= t1);
    }
  }
}
