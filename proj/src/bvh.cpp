#include "texrad/bvh.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace texrad {

namespace {

// Relative tolerance on the Möller-Trumbore determinant below which a ray counts as parallel.
constexpr double kParallelTolerance = 1e-12;
// Slab-test interval widening; keeps the box test conservative so only the triangle test decides.
constexpr double kSlabSlack = 1e-9;

struct MtResult {
  double t, u, v;
};

inline double det_tolerance(Vec3 e1, Vec3 e2) { return kParallelTolerance * std::sqrt(dot(e1, e1) * dot(e2, e2)); }

// Möller-Trumbore, with t evaluated first as tvec.(e1 x e2) / det so rays that cannot reach the
// triangle's plane within [t_min, t_max] leave before the barycentric terms.
inline bool moller_trumbore(Vec3 o, Vec3 d, Vec3 v0, Vec3 e1, Vec3 e2, Vec3 n, double det_tol, double t_min,
                            double t_max, MtResult& out) {
  const double det = -dot(d, n);
  if (std::abs(det) <= det_tol) return false;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = o - v0;
  const double t = dot(tvec, n) * inv_det;
  if (!(t >= t_min && t <= t_max)) return false;
  const Vec3 pvec = cross(d, e2);
  const double u = dot(tvec, pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qvec = cross(tvec, e1);
  const double v = dot(d, qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return false;
  out = {t, u, v};
  return true;
}

struct SlabRay {
  double ox, oy, oz, ix, iy, iz;

  explicit SlabRay(const Ray& r) : ox(r.origin.x), oy(r.origin.y), oz(r.origin.z) {
    ix = r.direction.x != 0.0 ? 1.0 / r.direction.x : 1e300;
    iy = r.direction.y != 0.0 ? 1.0 / r.direction.y : 1e300;
    iz = r.direction.z != 0.0 ? 1.0 / r.direction.z : 1e300;
  }

  bool overlaps(const Aabb& b, double t_min, double t_max) const {
    const double x0 = (b.lo.x - ox) * ix, x1 = (b.hi.x - ox) * ix;
    const double y0 = (b.lo.y - oy) * iy, y1 = (b.hi.y - oy) * iy;
    const double z0 = (b.lo.z - oz) * iz, z1 = (b.hi.z - oz) * iz;
    const double lo = std::max({t_min, std::min(x0, x1), std::min(y0, y1), std::min(z0, z1)});
    const double hi = std::min({t_max, std::max(x0, x1), std::max(y0, y1), std::max(z0, z1)});
    return lo <= hi + kSlabSlack * (1.0 + std::abs(hi));
  }
};

}  // namespace

std::optional<Hit> intersect_triangle(const Ray& ray, const Triangle& tri) {
  const Vec3 v0 = tri.v1.position;
  const Vec3 e1 = tri.v2.position - v0, e2 = tri.v3.position - v0;
  MtResult r;
  if (!moller_trumbore(ray.origin, ray.direction, v0, e1, e2, cross(e1, e2), det_tolerance(e1, e2), ray.t_min,
                       ray.t_max, r)) {
    return std::nullopt;
  }
  return Hit{r.t, r.u, r.v, 0};
}

const Aabb& Bvh::bounds() const {
  static const Aabb kEmpty;
  return nodes_.empty() ? kEmpty : nodes_.front().bounds;
}

Bvh build_bvh(const Scene& scene, int max_leaf_size) {
  Bvh bvh;
  bvh.max_leaf_size_ = std::max(1, max_leaf_size);
  const auto& tris = scene.triangles();
  if (tris.empty()) return bvh;

  std::vector<Aabb> boxes(tris.size());
  std::vector<Vec3> centroids(tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i) {
    boxes[i] = tris[i].bounds();
    centroids[i] = boxes[i].center();
  }
  bvh.order_.resize(tris.size());
  std::iota(bvh.order_.begin(), bvh.order_.end(), 0);
  bvh.nodes_.reserve(2 * tris.size() / bvh.max_leaf_size_ + 1);

  struct Task {
    int node, first, count, depth;
  };
  std::vector<Task> stack;
  bvh.nodes_.emplace_back();
  stack.push_back({0, 0, static_cast<int>(tris.size()), 1});
  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    bvh.depth_ = std::max(bvh.depth_, task.depth);
    Aabb bounds;
    for (int i = task.first; i < task.first + task.count; ++i) bounds.extend(boxes[bvh.order_[i]]);
    bvh.nodes_[task.node].bounds = bounds;
    if (task.count <= bvh.max_leaf_size_) {
      bvh.nodes_[task.node].first = task.first;
      bvh.nodes_[task.node].count = task.count;
      continue;
    }
    const int axis = bounds.longest_axis();
    const int half = task.count / 2;
    auto begin = bvh.order_.begin() + task.first;
    std::nth_element(begin, begin + half, begin + task.count, [&](int a, int b) {
      const double ca = centroids[a][axis], cb = centroids[b][axis];
      return ca < cb || (ca == cb && a < b);
    });
    const int left = static_cast<int>(bvh.nodes_.size());
    bvh.nodes_.emplace_back();
    bvh.nodes_.emplace_back();
    bvh.nodes_[task.node].left = left;
    bvh.nodes_[task.node].right = left + 1;
    stack.push_back({left + 1, task.first + half, task.count - half, task.depth + 1});
    stack.push_back({left, task.first, half, task.depth + 1});
  }

  bvh.tris_.reserve(tris.size());
  for (int idx : bvh.order_) {
    const Triangle& t = tris[idx];
    const Vec3 e1 = t.v2.position - t.v1.position, e2 = t.v3.position - t.v1.position;
    bvh.tris_.push_back({t.v1.position, e1, e2, cross(e1, e2), det_tolerance(e1, e2)});
  }
  return bvh;
}

bool Bvh::any_hit(const Ray& ray) const {
  if (nodes_.empty() || !(ray.t_min <= ray.t_max)) return false;
  const SlabRay slab(ray);
  std::array<int, 128> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!slab.overlaps(node.bounds, ray.t_min, ray.t_max)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const TriAccel& t = tris_[i];
        MtResult r;
        if (moller_trumbore(ray.origin, ray.direction, t.v0, t.e1, t.e2, t.n, t.det_tol, ray.t_min, ray.t_max, r)) return true;
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }
  return false;
}

std::optional<Hit> Bvh::closest_hit(const Ray& ray) const {
  if (nodes_.empty() || !(ray.t_min <= ray.t_max)) return std::nullopt;
  const SlabRay slab(ray);
  std::optional<Hit> best;
  double t_max = ray.t_max;
  std::array<int, 128> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!slab.overlaps(node.bounds, ray.t_min, t_max)) continue;
    if (node.leaf()) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const TriAccel& t = tris_[i];
        MtResult r;
        if (moller_trumbore(ray.origin, ray.direction, t.v0, t.e1, t.e2, t.n, t.det_tol, ray.t_min, t_max, r)) {
          const int index = order_[i];
          // Equal t resolves to the lower scene index so the answer is traversal-order independent.
          if (best && r.t == best->t && index > best->triangle_index) continue;
          best = Hit{r.t, r.u, r.v, index};
          t_max = r.t;
        }
      }
    } else {
      // Visit the nearer child first.
      const Node& l = nodes_[node.left];
      const Node& rn = nodes_[node.right];
      const int axis = node.bounds.longest_axis();
      const bool left_first = (ray.direction[axis] >= 0) == (l.bounds.center()[axis] <= rn.bounds.center()[axis]);
      stack[top++] = left_first ? node.right : node.left;
      stack[top++] = left_first ? node.left : node.right;
    }
  }
  return best;
}

double default_epsilon(const Scene& scene) { return 1e-4 * scene.bounds().diagonal(); }

bool occluded(const Bvh& bvh, Vec3 a, Vec3 b, double epsilon) {
  const Vec3 d = b - a;
  const double dist = length(d);
  if (dist <= 2 * epsilon) return false;
  return bvh.any_hit(Ray{a, d / dist, epsilon, dist - 2 * epsilon});
}

std::optional<Hit> closest_hit(const Bvh& bvh, const Ray& ray) { return bvh.closest_hit(ray); }

OcclusionProbe::OcclusionProbe(const Bvh& bvh, Vec3 origin, double epsilon)
    : bvh_(&bvh), origin_(origin), epsilon_(epsilon) {
  if (bvh.tris_.size() > kMaxCachedTriangles) return;
  side_.reserve(bvh.tris_.size());
  for (const auto& t : bvh.tris_) side_.push_back(dot(t.n, origin - t.v0));
}

bool OcclusionProbe::occluded(Vec3 target) const {
  const Vec3 d = target - origin_;
  const double dist = length(d);
  return occluded(target, d / dist, dist);
}

bool OcclusionProbe::occluded(Vec3 target, Vec3 dir, double dist) const {
  if (dist <= 2 * epsilon_) return false;
  if (side_.empty()) return bvh_->any_hit(Ray{origin_, dir, epsilon_, dist - 2 * epsilon_});
  const double t_max = dist - 2 * epsilon_;
  for (std::size_t i = 0; i < side_.size(); ++i) {
    const auto& t = bvh_->tris_[i];
    if (side_[i] * dot(t.n, target - t.v0) >= 0) continue;
    MtResult r;
    if (moller_trumbore(origin_, dir, t.v0, t.e1, t.e2, t.n, t.det_tol, epsilon_, t_max, r)) return true;
  }
  return false;
}

}  // namespace texrad
