#include "texrad/error.hpp"
#include "texrad/solver.hpp"

namespace texrad {

double gradient(const std::array<Rgb, 4>& lig, const std::array<Vec3, 4>& nrm) {
  Rgb lig_mean;
  Vec3 nrm_mean;
  for (int k = 0; k < 4; ++k) {
    lig_mean += lig[k];
    nrm_mean += nrm[k];
  }
  lig_mean = lig_mean * 0.25;
  nrm_mean *= 0.25;
  return 0.5 * length(lig[0] - lig_mean) + 0.5 * length(nrm[0] - nrm_mean);
}

void build_alpha_quadtree(TextureGroup& tg, double threshold, int max_node) {
  if (max_node != 2 && max_node != 4 && max_node != 8 && max_node != 16) {
    fail_usage("bad-max-node", "max_node must be one of 2, 4, 8, 16");
  }
  for (std::size_t i = 0; i < tg.texel_count(); ++i) tg.lig_in.texel(i)[3] = tg.occupied(i) ? 1.0f : 0.0f;

  for (int step = 2; step <= max_node; step *= 2) {
    const int half = step / 2;
    const float child_weight = static_cast<float>(half * half);
    for (int by = 0; by + step <= tg.height; by += step) {
      for (int bx = 0; bx + step <= tg.width; bx += step) {
        const std::array<std::size_t, 4> child = {
            static_cast<std::size_t>(by) * tg.width + bx,
            static_cast<std::size_t>(by) * tg.width + bx + half,
            static_cast<std::size_t>(by + half) * tg.width + bx,
            static_cast<std::size_t>(by + half) * tg.width + bx + half,
        };
        bool mergeable = true;
        for (std::size_t c : child) mergeable = mergeable && tg.lig_in.texel(c)[3] == child_weight;
        if (!mergeable) continue;
        std::array<Rgb, 4> lig;
        std::array<Vec3, 4> nrm;
        for (int k = 0; k < 4; ++k) {
          lig[k] = tg.lig_in.rgb(child[k]);
          nrm[k] = tg.normal(child[k]);
        }
        if (!(gradient(lig, nrm) < threshold)) continue;
        for (int k = 1; k < 4; ++k) tg.lig_in.texel(child[k])[3] = 0.0f;
        tg.lig_in.texel(child[0])[3] = 4 * child_weight;
      }
    }
  }
}

}  // namespace texrad
