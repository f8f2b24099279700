#include <array>
#include <cmath>

#include "texrad/error.hpp"
#include "texrad/solver.hpp"

namespace texrad {

namespace {

constexpr std::array<std::pair<SolveMode, std::string_view>, 6> kModes{{
    {SolveMode::full, "full"},
    {SolveMode::stride, "stride"},
    {SolveMode::monte_carlo, "monte_carlo"},
    {SolveMode::mipmapped, "mipmapped"},
    {SolveMode::subdiv, "subdiv"},
    {SolveMode::directional, "directional"},
}};

constexpr std::array<std::pair<Visibility, std::string_view>, 4> kVisibility{{
    {Visibility::traced, "traced"},
    {Visibility::voxel, "voxel"},
    {Visibility::hybrid, "hybrid"},
    {Visibility::cached, "cached"},
}};

bool uses_window(SolveMode m) {
  return m == SolveMode::stride || m == SolveMode::monte_carlo || m == SolveMode::mipmapped;
}

}  // namespace

std::string_view to_string(SolveMode mode) {
  for (auto [m, name] : kModes) {
    if (m == mode) return name;
  }
  return "?";
}

std::string_view to_string(Visibility visibility) {
  for (auto [v, name] : kVisibility) {
    if (v == visibility) return name;
  }
  return "?";
}

SolveMode parse_mode(std::string_view name) {
  for (auto [m, n] : kModes) {
    if (n == name) return m;
  }
  fail_usage("bad-mode", "unknown mode '" + std::string(name) +
                             "' (expected full, stride, monte_carlo, mipmapped, subdiv or directional)");
}

Visibility parse_visibility(std::string_view name) {
  for (auto [v, n] : kVisibility) {
    if (n == name) return v;
  }
  fail_usage("bad-visibility", "unknown visibility '" + std::string(name) + "' (expected traced, voxel, hybrid or cached)");
}

void SolverConfig::validate(int width, int height) const {
  if (width < 1 || height < 1) fail_usage("bad-resolution", "lightmap resolution must be positive");
  if (window_m != 1 && window_m != 4 && window_m != 16 && window_m != 64 && window_m != 256) {
    fail_usage("bad-window", "window must be one of 1, 4, 16, 64, 256");
  }
  if (window_m != 1 && !uses_window(mode)) {
    fail_usage("window-mode-mismatch", "mode " + std::string(to_string(mode)) + " does not take a window");
  }
  const int side = static_cast<int>(std::lround(std::sqrt(window_m)));
  if (side > width || side > height) fail_usage("bad-window", "window is larger than the lightmap");
  if (max_node != 2 && max_node != 4 && max_node != 8 && max_node != 16) {
    fail_usage("bad-max-node", "max_node must be one of 2, 4, 8, 16");
  }
  if (!(gradient_threshold >= 0)) fail_usage("bad-threshold", "gradient threshold must be non-negative");
  if (!(reflectivity >= 0) || !std::isfinite(reflectivity)) fail_usage("bad-reflectivity", "reflectivity must be finite and >= 0");
  if (!(contribution_clamp > 0)) fail_usage("bad-clamp", "contribution clamp must be positive");
  if (!(form_factor_clamp > 0)) fail_usage("bad-clamp", "form factor clamp must be positive");
  if (!(distance_factor > 0) || !std::isfinite(distance_factor)) fail_usage("bad-distance-factor", "distance factor must be positive");
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) fail_usage("bad-epsilon", "epsilon must be finite and >= 0");
  if (batch_ray_limit < static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height)) {
    fail_usage("bad-batch", "batch ray limit must be at least the texel count");
  }
  if (!(hybrid_ratio >= 0 && hybrid_ratio <= 1)) fail_usage("bad-ratio", "hybrid ratio must be in [0, 1]");
  if (voxel_resolution < 2 || voxel_resolution > 512) fail_usage("bad-resolution", "voxel resolution must be in [2, 512]");
  if (!(voxel_step > 0 && voxel_step <= 1)) fail_usage("bad-step", "voxel step must be in (0, 1]");
  if (passes < 0) fail_usage("bad-passes", "passes must be >= 0");
  if (workers < 0) fail_usage("bad-workers", "workers must be >= 0");
  if (visibility == Visibility::cached && !(mode == SolveMode::full || mode == SolveMode::stride || mode == SolveMode::mipmapped)) {
    fail_usage("cache-mode-mismatch", "cached visibility needs a contributor set that is fixed across passes "
                                      "(full, stride or mipmapped)");
  }
  if (mode == SolveMode::directional && visibility != Visibility::traced) {
    fail_usage("visibility-mode-mismatch", "directional mode resolves visibility by closest hit; use traced");
  }
  if (blur_level < 0) fail_usage("bad-blur", "blur level must be >= 0");
  if (blur_level > 0 && mode != SolveMode::directional) fail_usage("blur-mode-mismatch", "blur applies to directional mode only");
  if (blur_level > 0 && ((width >> blur_level) < 1 || (height >> blur_level) < 1)) {
    fail_usage("bad-blur", "blur level exceeds the mipmap chain");
  }
}

FormFactorSample form_factor(Vec3 pos_i, Vec3 nrm_i, Vec3 pos_j, Vec3 nrm_j, double area_j, const SolverConfig& cfg) {
  const Vec3 d = pos_j - pos_i;
  const double dist = length(d);
  if (dist == 0) return {};
  return form_factor_along(nrm_i, nrm_j, d / dist, dist, area_j, cfg);
}

FormFactorSample form_factor(const TextureGroup& tg, PatchId i, PatchId j, const SolverConfig& cfg) {
  return form_factor(tg.position(i.linear), tg.normal(i.linear), tg.position(j.linear), tg.normal(j.linear),
                     tg.area(j.linear), cfg);
}

}  // namespace texrad
