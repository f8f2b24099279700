#include <bit>
#include <chrono>
#include <cmath>

#include "texrad/error.hpp"
#include "texrad/parallel.hpp"
#include "texrad/solver.hpp"

namespace texrad {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Rgb clamp_addend(Rgb a, double clamp) { return std::isinf(clamp) ? a : min(a, clamp); }

// Occupied patches grouped into contiguous row strips of at most `limit` rays (one row minimum).
std::vector<std::vector<std::size_t>> row_strips(const TextureGroup& tg, std::uint64_t rays_per_patch,
                                                 std::uint64_t limit) {
  std::vector<std::vector<std::size_t>> strips;
  std::vector<std::size_t> current;
  std::vector<std::size_t> row;
  for (int y = 0; y < tg.height; ++y) {
    row.clear();
    for (int x = 0; x < tg.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * tg.width + x;
      if (tg.occupied(i)) row.push_back(i);
    }
    if (row.empty()) continue;
    if (!current.empty() && (current.size() + row.size()) * rays_per_patch > limit) {
      strips.push_back(std::move(current));
      current.clear();
    }
    current.insert(current.end(), row.begin(), row.end());
  }
  if (!current.empty()) strips.push_back(std::move(current));
  return strips;
}

double energy_of(const TextureGroup& tg) {
  double e = 0;
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    if (tg.occupied(i)) e += tg.lig_out.rgb(i).sum();
  }
  return e;
}

void write_out(TextureGroup& tg, std::size_t i, Rgb c) {
  tg.lig_out.set_rgb(i, c);
  tg.lig_out.texel(i)[3] = 1.0f;
}

}  // namespace

PassReport gather_pass(TextureGroup& tg, const VisibilityBackends& vis, const SolverConfig& cfg, int pass_index) {
  cfg.validate(tg.width, tg.height);
  if (cfg.mode == SolveMode::directional) fail_usage("bad-mode", "directional mode runs through directional_pass");
  const bool needs_bvh = cfg.visibility != Visibility::voxel;
  const bool needs_voxels = cfg.visibility == Visibility::voxel || cfg.visibility == Visibility::hybrid;
  if (needs_bvh && !vis.bvh) fail_usage("missing-bvh", "visibility mode needs a BVH");
  if (needs_voxels && !vis.voxels) fail_usage("missing-voxels", "visibility mode needs a voxel map");
  if (cfg.visibility == Visibility::cached && !vis.cache) fail_usage("missing-cache", "cached visibility needs a cache");

  const auto start = Clock::now();
  PassReport report;
  report.pass = pass_index + 1;
  report.mode = cfg.mode;

  LigPyramid pyr;
  if (cfg.mode == SolveMode::mipmapped) {
    pyr = build_lig_mipmaps(tg, std::countr_zero(static_cast<unsigned>(std::lround(std::sqrt(cfg.window_m)))));
  }
  const std::vector<Contributor> contributors = contributor_set(tg, cfg, pass_index, &pyr);
  const int workers = resolve_workers(cfg.workers);
  std::vector<PassCounters> counters(static_cast<std::size_t>(workers));
  const std::vector<std::size_t> patches = tg.occupied_patches();

  // Probes at every contributor, for pairs traced from the contributor side.
  std::vector<OcclusionProbe> probes;
  if (needs_bvh) {
    probes.reserve(contributors.size());
    for (const Contributor& c : contributors) probes.emplace_back(*vis.bvh, c.position, vis.epsilon);
  }

  VisCache* cache = cfg.visibility == Visibility::cached && vis.cache->enabled() ? vis.cache : nullptr;
  std::uint64_t first_pass_traces = 0;
  if (cache && !cache->populated()) {
    // Trace each unordered pair once. A pair whose members are both contributors is filled by the
    // shooter with the lower index; otherwise only the shooter side ever asks for it.
    std::vector<char> in_set(tg.texel_count(), 0);
    for (const Contributor& c : contributors) in_set[c.id.linear] = 1;
    std::vector<PassCounters> fill(static_cast<std::size_t>(workers));
    parallel_for(patches.size(), workers, [&](std::size_t k, int w) {
      const std::size_t i = patches[k];
      const PatchId pi = PatchId::from_linear(i, tg.width);
      const OcclusionProbe probe(*vis.bvh, tg.position(i), vis.epsilon);
      for (std::size_t ci = 0; ci < contributors.size(); ++ci) {
        const Contributor& c = contributors[ci];
        if (c.id.linear == i || (in_set[i] && c.id.linear < i)) continue;
        cached_visibility(*cache, *vis.bvh, pi, c.id, tg, true, vis.epsilon, fill[w], &probe, &probes[ci]);
      }
    });
    for (const auto& f : fill) first_pass_traces += f.rays_traced;
    cache->mark_populated();
  }

  const double rho = cfg.reflectivity;
  const double voxel_share = 100.0 * cfg.hybrid_ratio;
  auto shade = [&](std::size_t i, PassCounters& cnt) {
    const Vec3 p = tg.position(i), n = tg.normal(i);
    const Rgb m = tg.mat.rgb(i) * rho;
    const PatchId pi = PatchId::from_linear(i, tg.width);
    const std::optional<OcclusionProbe> probe =
        needs_bvh ? std::optional<OcclusionProbe>(std::in_place, *vis.bvh, p, vis.epsilon) : std::nullopt;
    // pair_visible with the direction already at hand. Negating dir is exact, so the reverse query
    // from the contributor gives the same bits as tracing it from scratch.
    auto traced = [&](std::size_t ci, Vec3 dir, double dist) {
      return contributors[ci].id.linear > i ? !probe->occluded(contributors[ci].position, dir, dist)
                                            : !probes[ci].occluded(p, -dir, dist);
    };
    Rgb acc = tg.emission.rgb(i);
    for (std::size_t ci = 0; ci < contributors.size(); ++ci) {
      const Contributor& c = contributors[ci];
      if (c.id.linear == i) continue;
      const Vec3 d = c.position - p;
      const double dist = length(d);
      const Vec3 dir = d / dist;
      const FormFactorSample ff = dist > 0 ? form_factor_along(n, c.normal, dir, dist, c.area, cfg) : FormFactorSample{};
      if (cfg.cull_zero_terms && (ff.F == 0 || c.lig.max_component() == 0)) continue;
      bool visible;
      switch (cfg.visibility) {
        case Visibility::traced:
          ++cnt.rays_traced;
          visible = traced(ci, dir, dist);
          break;
        case Visibility::voxel:
          ++cnt.raymarches;
          visible = !raymarch_occluded(*vis.voxels, p, c.position, cfg.voxel_step);
          break;
        case Visibility::hybrid:
          if (static_cast<double>(c.id.linear % 100) < voxel_share) {
            ++cnt.raymarches;
            visible = !raymarch_occluded(*vis.voxels, p, c.position, cfg.voxel_step);
          } else {
            ++cnt.rays_traced;
            visible = traced(ci, dir, dist);
          }
          break;
        case Visibility::cached:
        default:
          visible = cached_visibility(*vis.cache, *vis.bvh, pi, c.id, tg, false, vis.epsilon, cnt, &*probe, &probes[ci]);
          break;
      }
      if (!visible || ff.F == 0) continue;
      acc += clamp_addend(c.lig * m * (c.weight * ff.F), cfg.contribution_clamp);
    }
    write_out(tg, i, acc);
  };

  std::fill(tg.lig_out.data().begin(), tg.lig_out.data().end(), 0.0f);
  const auto strips = row_strips(tg, std::max<std::uint64_t>(contributors.size(), 1), cfg.batch_ray_limit);
  for (const auto& strip : strips) {
    parallel_for(strip.size(), workers, [&](std::size_t k, int w) { shade(strip[k], counters[w]); });
  }

  PassCounters total;
  for (const auto& c : counters) total += c;
  if (cache && first_pass_traces > 0) {
    // Every lookup of this pass beyond the freshly traced pairs counts as a hit.
    total.rays_traced += first_pass_traces;
    total.cache_hits -= first_pass_traces;
  }
  report.rays_traced = total.rays_traced;
  report.raymarches = total.raymarches;
  report.cache_hits = total.cache_hits;
  report.batches = strips.size();
  report.energy_sum = energy_of(tg);
  report.wall_ms = elapsed_ms(start);
  return report;
}

namespace {

// Texel hit by a closest-hit query, moved to the first occupied 8-neighbor when it lands on an
// unoccupied texel. Returns nothing if no occupied texel is found.
std::optional<std::size_t> resolve_hit(const TextureGroup& tg, const Scene& scene, const Hit& hit) {
  const Triangle& t = scene.triangles()[static_cast<std::size_t>(hit.triangle_index)];
  const double w0 = 1.0 - hit.u - hit.v;
  const double u = w0 * t.v1.uv.x + hit.u * t.v2.uv.x + hit.v * t.v3.uv.x;
  const double v = w0 * t.v1.uv.y + hit.u * t.v2.uv.y + hit.v * t.v3.uv.y;
  const int x = std::clamp(static_cast<int>(std::floor(u * tg.width)), 0, tg.width - 1);
  const int y = std::clamp(static_cast<int>(std::floor(v * tg.height)), 0, tg.height - 1);
  if (tg.occupied(x, y)) return PatchId::from_xy(x, y, tg.width).linear;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int nx = x + dx, ny = y + dy;
      if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= tg.width || ny >= tg.height) continue;
      if (tg.occupied(nx, ny)) return PatchId::from_xy(nx, ny, tg.width).linear;
    }
  }
  return std::nullopt;
}

}  // namespace

PassReport directional_pass(TextureGroup& tg, const Scene& scene, const Bvh& bvh, const DirectionSet& dirs,
                            const SolverConfig& cfg, int pass_index) {
  cfg.validate(tg.width, tg.height);
  if (dirs.empty()) fail_usage("no-directions", "directional mode needs a non-empty direction set");
  const auto start = Clock::now();
  PassReport report;
  report.pass = pass_index + 1;
  report.mode = SolveMode::directional;

  LigPyramid pyr;
  if (cfg.blur_level > 0) pyr = build_lig_mipmaps(tg, cfg.blur_level);
  auto lig_at = [&](std::size_t j) {
    if (cfg.blur_level == 0) return tg.lig_in.rgb(j);
    const LigLevel& lv = pyr[static_cast<std::size_t>(cfg.blur_level)];
    const int x = static_cast<int>(j % tg.width) >> cfg.blur_level, y = static_cast<int>(j / tg.width) >> cfg.blur_level;
    return lv.rgb[static_cast<std::size_t>(y) * lv.width + x];
  };

  const double epsilon = cfg.epsilon > 0 ? cfg.epsilon : (scene.empty() ? 0.0 : default_epsilon(scene));
  const double norm = cfg.reflectivity / (kPi * static_cast<double>(dirs.size()));
  const int workers = resolve_workers(cfg.workers);
  std::vector<PassCounters> counters(static_cast<std::size_t>(workers));
  const std::vector<std::size_t> patches = tg.occupied_patches();

  std::fill(tg.lig_out.data().begin(), tg.lig_out.data().end(), 0.0f);
  const auto strips = row_strips(tg, dirs.size(), cfg.batch_ray_limit);
  for (const auto& strip : strips) {
    parallel_for(strip.size(), workers, [&](std::size_t k, int w) {
      const std::size_t i = strip[k];
      const Vec3 p = tg.position(i), n = tg.normal(i);
      const Frame frame = Frame::from_normal(n);
      const Rgb m = tg.mat.rgb(i) * norm;
      Rgb acc = tg.emission.rgb(i);
      for (const Vec3& d : dirs.directions) {
        const Vec3 omega = frame.to_world(d);
        ++counters[w].rays_traced;
        const auto hit = bvh.closest_hit(Ray{p, omega, epsilon, INFINITY});
        if (!hit) continue;
        const auto j = resolve_hit(tg, scene, *hit);
        if (!j || *j == i) continue;
        const Vec3 q = tg.position(*j);
        const double r2 = dot(q - p, q - p);
        if (r2 == 0) continue;
        const double g = (cfg.directional_cosine ? dot(omega, n) : 1.0) / r2;
        if (!(g > 0)) continue;
        acc += clamp_addend(lig_at(*j) * m * g, cfg.contribution_clamp);
      }
      write_out(tg, i, acc);
    });
  }

  PassCounters total;
  for (const auto& c : counters) total += c;
  report.rays_traced = total.rays_traced;
  report.batches = strips.size();
  report.energy_sum = energy_of(tg);
  report.wall_ms = elapsed_ms(start);
  return report;
}

ProgressiveSolver::ProgressiveSolver(const Scene& scene, TextureGroup& tg, const SolverConfig& cfg,
                                     const DirectionSet* dirs)
    : scene_(scene), tg_(tg), cfg_(cfg), dirs_(dirs) {
  cfg_.validate(tg.width, tg.height);
  if (cfg_.mode == SolveMode::directional && (!dirs_ || dirs_->empty())) {
    fail_usage("no-directions", "directional mode needs a direction table");
  }
  bvh_ = build_bvh(scene_);
  epsilon_ = cfg_.epsilon > 0 ? cfg_.epsilon : (scene_.empty() ? 0.0 : default_epsilon(scene_));
  cfg_.epsilon = epsilon_;
  if ((cfg_.visibility == Visibility::voxel || cfg_.visibility == Visibility::hybrid) && !scene_.empty()) {
    voxels_ = voxelize(scene_, cfg_.voxel_resolution);
  }
  if (cfg_.visibility == Visibility::cached) cache_ = VisCache(tg_.texel_count(), cfg_.cache_capacity_bytes);
  tg_.reset_lighting();
}

PassReport ProgressiveSolver::run_pass() {
  PassReport report;
  if (cfg_.mode == SolveMode::directional) {
    report = directional_pass(tg_, scene_, bvh_, *dirs_, cfg_, pass_);
  } else {
    if (cfg_.mode == SolveMode::subdiv) build_alpha_quadtree(tg_, cfg_.gradient_threshold, cfg_.max_node);
    VoxelMap empty_voxels;
    const VisibilityBackends vis{&bvh_, voxels_ ? &*voxels_ : &empty_voxels, &cache_, epsilon_};
    report = gather_pass(tg_, vis, cfg_, pass_);
  }
  std::swap(tg_.lig_in, tg_.lig_out);
  ++pass_;
  return report;
}

std::vector<PassReport> ProgressiveSolver::run() {
  std::vector<PassReport> reports;
  for (int k = 0; k < cfg_.passes; ++k) reports.push_back(run_pass());
  return reports;
}

}  // namespace texrad
