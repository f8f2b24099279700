#include "texrad/error.hpp"
#include "texrad/solver.hpp"

namespace texrad {

Image classical_solve(const TextureGroup& tg, const Bvh& bvh, int bounces, const SolverConfig& cfg) {
  if (bounces < 0) fail_usage("bad-bounces", "bounces must be >= 0");
  const std::vector<std::size_t> patches = tg.occupied_patches();
  const std::size_t k = patches.size();
  if (k > kMaxClassicalPatches) {
    fail_usage("too-many-patches", "classical solve supports at most " + std::to_string(kMaxClassicalPatches) +
                                       " patches, got " + std::to_string(k));
  }
  const double eps = cfg.epsilon > 0 ? cfg.epsilon : 1e-4 * bvh.bounds().diagonal();

  // Dense F o V. Each unordered pair is traced once; the mirrored entry follows from reciprocity.
  std::vector<double> fv(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t i = patches[a];
    const OcclusionProbe probe(bvh, tg.position(i), eps);
    for (std::size_t b = a + 1; b < k; ++b) {
      const std::size_t j = patches[b];
      const Vec3 d = tg.position(j) - tg.position(i);
      const double dist = length(d);
      if (dist == 0) continue;
      const double cos_i = dot(tg.normal(i), d) / dist, cos_j = -dot(tg.normal(j), d) / dist;
      if (cos_i <= 0 || cos_j <= 0) continue;
      if (probe.occluded(tg.position(j))) continue;
      const double r = dist * cfg.distance_factor;
      const double f_ij = tg.area(j) * cos_i * cos_j / (kPi * r * r);
      const double f_ji = f_ij * tg.area(i) / tg.area(j);
      fv[a * k + b] = std::min(f_ij, cfg.form_factor_clamp);
      fv[b * k + a] = std::min(f_ji, cfg.form_factor_clamp);
    }
  }

  std::vector<Rgb> emission(k), refl(k), cur(k), next(k);
  for (std::size_t a = 0; a < k; ++a) {
    emission[a] = tg.emission.rgb(patches[a]);
    refl[a] = tg.mat.rgb(patches[a]) * cfg.reflectivity;
  }
  cur = emission;
  for (int pass = 0; pass < bounces; ++pass) {
    for (std::size_t a = 0; a < k; ++a) {
      Rgb gathered;
      const double* row = fv.data() + a * k;
      for (std::size_t b = 0; b < k; ++b) gathered += cur[b] * row[b];
      next[a] = emission[a] + refl[a] * gathered;
    }
    std::swap(cur, next);
  }

  Image out(tg.width, tg.height, 3);
  for (std::size_t a = 0; a < k; ++a) out.set_rgb(patches[a], cur[a]);
  return out;
}

}  // namespace texrad
