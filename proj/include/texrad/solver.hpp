#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texrad/bvh.hpp"
#include "texrad/directions.hpp"
#include "texrad/scene.hpp"
#include "texrad/texture_group.hpp"
#include "texrad/voxel.hpp"

namespace texrad {

enum class SolveMode { full, stride, monte_carlo, mipmapped, subdiv, directional };
enum class Visibility { traced, voxel, hybrid, cached };

std::string_view to_string(SolveMode mode);
std::string_view to_string(Visibility visibility);
// Throw a usage error for unknown names.
SolveMode parse_mode(std::string_view name);
Visibility parse_visibility(std::string_view name);

struct SolverConfig {
  SolveMode mode = SolveMode::full;
  int window_m = 1;  // patches per contributor sample; a perfect square
  double gradient_threshold = 0.05;
  int max_node = 16;
  double reflectivity = 0.9;
  double contribution_clamp = 0.05;  // per-channel cap on each addend; +inf disables it
  double form_factor_clamp = 1.0;
  double distance_factor = 1.0;
  double epsilon = 0.0;  // 0 selects 1e-4 of the scene diagonal
  std::uint64_t batch_ray_limit = 268435456;  // 128^4
  Visibility visibility = Visibility::traced;
  double hybrid_ratio = 0.5;  // fraction of queries answered by the voxel map
  int voxel_resolution = 64;
  double voxel_step = 0.5;
  std::uint64_t cache_capacity_bytes = std::uint64_t{1} << 32;
  int passes = 1;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = one per hardware thread
  // Directional mode.
  int blur_level = 0;
  bool directional_cosine = true;
  // Skip visibility queries whose addend is provably zero (dark contributor or zero form factor).
  // Results are unchanged; ray counters then no longer equal the full pair count.
  bool cull_zero_terms = false;

  // Throws a usage error if the configuration is inconsistent with itself or the lightmap size.
  void validate(int width, int height) const;
};

struct FormFactorSample {
  double F = 0;
  double cos_i = 0, cos_j = 0;
  double r = 0;
};

// Point-to-patch form factor F = arf(j) cos_i cos_j / (pi r^2), clamped to cfg.form_factor_clamp.
// r is the patch distance scaled by cfg.distance_factor. Back-facing or coincident pairs give 0.
FormFactorSample form_factor(const TextureGroup& tg, PatchId i, PatchId j, const SolverConfig& cfg = {});
FormFactorSample form_factor(Vec3 pos_i, Vec3 nrm_i, Vec3 pos_j, Vec3 nrm_j, double area_j, const SolverConfig& cfg);

// The same, given the unit direction from i to j and their distance (> 0).
inline FormFactorSample form_factor_along(Vec3 nrm_i, Vec3 nrm_j, Vec3 dir, double dist, double area_j,
                                          const SolverConfig& cfg) {
  FormFactorSample s;
  s.cos_i = dot(nrm_i, dir);
  s.cos_j = -dot(nrm_j, dir);
  s.r = dist * cfg.distance_factor;
  if (s.cos_i <= 0 || s.cos_j <= 0) return s;
  s.F = std::min(area_j * s.cos_i * s.cos_j / (kPi * s.r * s.r), cfg.form_factor_clamp);
  return s;
}

// ---- contributor selection ----

// RGB plus summed occupancy per level; level 0 mirrors lig_in. Level L + 1 is half the size (rounded
// up) and holds the occupancy-weighted mean of its 2x2 children.
struct LigLevel {
  int width = 0, height = 0;
  std::vector<Rgb> rgb;
  std::vector<double> occupancy;
};
using LigPyramid = std::vector<LigLevel>;

LigPyramid build_lig_mipmaps(const TextureGroup& tg, int levels);

struct Contributor {
  PatchId id;
  double weight = 0;
  Vec3 position, normal;
  double area = 0;
  Rgb lig;
};

// Contributors of one pass, shared by every shooter (a shooter skips itself). `pyramid` is needed only
// in mipmapped mode. Windows are sqrt(m) x sqrt(m) blocks in row-major order; empty windows give no
// sample.
std::vector<Contributor> contributor_set(const TextureGroup& tg, const SolverConfig& cfg, int pass_index,
                                         const LigPyramid* pyramid = nullptr);

struct WeightedPatch {
  PatchId id;
  double weight = 0;
};
std::vector<WeightedPatch> select_contributors(const TextureGroup& tg, const SolverConfig& cfg, PatchId shooter,
                                               int pass_index);

// ---- adaptive subdivision ----

// ½|lig(a) - mean lig| + ½|nrm(a) - mean nrm| over four children; a is index 0 (top-left).
double gradient(const std::array<Rgb, 4>& lig, const std::array<Vec3, 4>& nrm);

// Resets lig_in alpha to occupancy, then for step = 2, 4, ..., max_node merges every step x step block
// whose four children each carry (step/2)^2 and whose gradient is below `threshold`. The merged weight
// moves onto the block's top-left texel.
void build_alpha_quadtree(TextureGroup& tg, double threshold, int max_node);

// ---- visibility cache ----

// x + (x + y)(x + y + 1) / 2. Throws a usage error if the result exceeds 64 bits.
std::uint64_t cantor(std::uint64_t x, std::uint64_t y);

// Mirrored pairing cantor(n - 1 - max, min) of two distinct patch indices below n. Symmetric,
// injective, and dense: addresses fill [0, n(n-1)/2).
std::uint64_t pair_address(PatchId a, PatchId b, std::size_t n);

// One bit per unordered patch pair meaning "visible". The cache is allocated only when every pair of
// the lightmap fits into the capacity; otherwise it stays disabled and every query traces.
class VisCache {
 public:
  VisCache() = default;
  VisCache(std::size_t patch_count, std::uint64_t capacity_bytes = std::uint64_t{1} << 32);

  bool enabled() const { return !words_.empty(); }
  std::size_t patch_count() const { return n_; }
  std::uint64_t byte_size() const { return words_.size() * sizeof(std::uint64_t); }
  bool populated() const { return populated_; }
  void mark_populated() { populated_ = true; }

  // Address of the pair, or nothing when the pair is not cached.
  std::optional<std::uint64_t> address(PatchId a, PatchId b) const;
  bool visible(std::uint64_t address) const;
  // Safe to call concurrently.
  void store_visible(std::uint64_t address);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
  bool populated_ = false;
};

struct PassCounters {
  std::uint64_t rays_traced = 0;
  std::uint64_t raymarches = 0;
  std::uint64_t cache_hits = 0;

  PassCounters& operator+=(const PassCounters& o) {
    rays_traced += o.rays_traced;
    raymarches += o.raymarches;
    cache_hits += o.cache_hits;
    return *this;
  }
};

// Traced visibility of two patches, always cast from the one with the lower linear index. The ray
// interval is not symmetric, so this makes the answer independent of which side asks and lets the
// cache hold one bit per pair. Probes, when given, must originate at a and b respectively.
bool pair_visible(const Bvh& bvh, const TextureGroup& tg, PatchId a, PatchId b, double epsilon,
                  const OcclusionProbe* probe_a = nullptr, const OcclusionProbe* probe_b = nullptr);

// First pass: trace, store, return. Later passes: read the stored bit. Uncached pairs always trace.
// Returns pair_visible(a, b).
bool cached_visibility(VisCache& cache, const Bvh& bvh, PatchId a, PatchId b, const TextureGroup& tg,
                       bool first_pass, double epsilon, PassCounters& counters,
                       const OcclusionProbe* probe_a = nullptr, const OcclusionProbe* probe_b = nullptr);

// ---- passes ----

struct VisibilityBackends {
  const Bvh* bvh = nullptr;
  const VoxelMap* voxels = nullptr;
  VisCache* cache = nullptr;
  double epsilon = 0;
};

struct PassReport {
  int pass = 0;
  SolveMode mode = SolveMode::full;
  std::uint64_t rays_traced = 0;
  std::uint64_t raymarches = 0;
  std::uint64_t cache_hits = 0;
  std::size_t batches = 0;
  double wall_ms = 0;
  double energy_sum = 0;  // sum of lig_out RGB over occupied patches
};

// One gather iteration for the non-directional modes. Reads lig_in, writes lig_out; the caller swaps.
PassReport gather_pass(TextureGroup& tg, const VisibilityBackends& vis, const SolverConfig& cfg, int pass_index);

// One directional iteration: closest-hit gathering along `dirs` rotated into each patch's frame.
PassReport directional_pass(TextureGroup& tg, const Scene& scene, const Bvh& bvh, const DirectionSet& dirs,
                            const SolverConfig& cfg, int pass_index);

inline constexpr std::size_t kMaxClassicalPatches = 4096;

// Truncated Neumann series L_k = E + rho diag(mat) (F o V) L_{k-1} over a dense matrix of occupied
// patches. Returns a 3-channel image of L_bounces. No contribution clamp is applied.
Image classical_solve(const TextureGroup& tg, const Bvh& bvh, int bounces, const SolverConfig& cfg = {});

// Owns the acceleration structures of a bake and runs passes in order, swapping lig_in and lig_out.
class ProgressiveSolver {
 public:
  ProgressiveSolver(const Scene& scene, TextureGroup& tg, const SolverConfig& cfg, const DirectionSet* dirs = nullptr);

  PassReport run_pass();
  std::vector<PassReport> run();  // cfg.passes passes

  int passes_done() const { return pass_; }
  const Bvh& bvh() const { return bvh_; }
  const VisCache& cache() const { return cache_; }
  double epsilon() const { return epsilon_; }

 private:
  const Scene& scene_;
  TextureGroup& tg_;
  SolverConfig cfg_;
  const DirectionSet* dirs_;
  Bvh bvh_;
  std::optional<VoxelMap> voxels_;
  VisCache cache_;
  double epsilon_ = 0;
  int pass_ = 0;
};

}  // namespace texrad
