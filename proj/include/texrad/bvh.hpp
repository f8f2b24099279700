#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "texrad/math.hpp"
#include "texrad/scene.hpp"

namespace texrad {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double t_min = 0;
  double t_max = INFINITY;
};

struct Hit {
  double t = 0;
  double u = 0, v = 0;  // weights of the second and third vertex
  int triangle_index = -1;
};

// Möller-Trumbore. Reports a hit iff u >= 0, v >= 0, u + v <= 1 and t lies in [t_min, t_max].
// Rays (nearly) parallel to the triangle plane miss. Culling is never applied.
std::optional<Hit> intersect_triangle(const Ray& ray, const Triangle& triangle);

// Binary BVH over scene triangles, median split on the longest node axis. Immutable once built and
// safe for any number of concurrent queries.
class Bvh {
 public:
  struct Node {
    Aabb bounds;
    // Interior: children `left` and `right`. Leaf: triangles [first, first + count) of triangle_order().
    int left = -1, right = -1;
    int first = 0, count = 0;
    bool leaf() const { return count > 0; }
  };

  Bvh() = default;

  const std::vector<Node>& nodes() const { return nodes_; }
  // Scene triangle indices in leaf order.
  const std::vector<int>& triangle_order() const { return order_; }
  int max_leaf_size() const { return max_leaf_size_; }
  int depth() const { return depth_; }
  std::size_t triangle_count() const { return order_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Aabb& bounds() const;

  // Any-hit query along `ray`; returns at the first confirmed intersection.
  bool any_hit(const Ray& ray) const;
  std::optional<Hit> closest_hit(const Ray& ray) const;

  friend Bvh build_bvh(const Scene& scene, int max_leaf_size);
  friend class OcclusionProbe;

 private:
  // Precomputed triangle in leaf order.
  struct TriAccel {
    Vec3 v0, e1, e2, n;  // n = e1 x e2
    double det_tol;
  };

  std::vector<Node> nodes_;
  std::vector<int> order_;
  std::vector<TriAccel> tris_;
  int max_leaf_size_ = 4;
  int depth_ = 0;
};

Bvh build_bvh(const Scene& scene, int max_leaf_size = 4);

// Scene-relative offset used by visibility rays: 1e-4 of the bounds diagonal.
double default_epsilon(const Scene& scene);

// True iff geometry intersects the segment from a toward b within t in [eps, |b - a| - 2 eps].
// Pairs closer than that interval allows are reported mutually visible.
bool occluded(const Bvh& bvh, Vec3 a, Vec3 b, double epsilon);

std::optional<Hit> closest_hit(const Bvh& bvh, const Ray& ray);

// Repeated occlusion queries from one origin, answering exactly as occluded(bvh, origin, target, eps).
// For small scenes the signed plane offset of the origin is cached per triangle; a triangle whose
// plane has origin and target on the same side cannot block the segment and is skipped without
// traversal. Larger scenes fall back to the plain BVH query.
class OcclusionProbe {
 public:
  static constexpr std::size_t kMaxCachedTriangles = 256;

  OcclusionProbe(const Bvh& bvh, Vec3 origin, double epsilon);
  bool occluded(Vec3 target) const;
  // Same query with the caller's unit direction and distance from the origin to `target`.
  bool occluded(Vec3 target, Vec3 dir, double dist) const;

 private:
  const Bvh* bvh_;
  Vec3 origin_;
  double epsilon_;
  std::vector<double> side_;  // per triangle in leaf order; empty when not cached
};

}  // namespace texrad
