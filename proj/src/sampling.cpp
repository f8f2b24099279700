#include <bit>
#include <cmath>

#include "texrad/error.hpp"
#include "texrad/solver.hpp"

namespace texrad {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based draw for one window; depends only on (seed, window, pass).
std::uint64_t window_hash(std::uint64_t seed, std::uint64_t window, int pass_index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ window) ^ static_cast<std::uint64_t>(pass_index));
}

int window_side(const SolverConfig& cfg) { return static_cast<int>(std::lround(std::sqrt(cfg.window_m))); }

Contributor make_contributor(const TextureGroup& tg, std::size_t linear, double weight, Rgb lig) {
  return {PatchId::from_linear(linear, tg.width), weight, tg.position(linear), tg.normal(linear), tg.area(linear), lig};
}

}  // namespace

LigPyramid build_lig_mipmaps(const TextureGroup& tg, int levels) {
  if (levels < 0 || (levels > 0 && ((tg.width >> levels) < 1 || (tg.height >> levels) < 1))) {
    fail_usage("bad-levels", "mipmap level count exceeds log2 of the resolution");
  }
  LigPyramid pyr(static_cast<std::size_t>(levels) + 1);
  LigLevel& base = pyr[0];
  base.width = tg.width;
  base.height = tg.height;
  base.rgb.resize(tg.texel_count());
  base.occupancy.resize(tg.texel_count());
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    base.occupancy[i] = tg.occupied(i) ? 1.0 : 0.0;
    base.rgb[i] = tg.occupied(i) ? tg.lig_in.rgb(i) : Rgb{};
  }
  for (int l = 1; l <= levels; ++l) {
    const LigLevel& src = pyr[l - 1];
    LigLevel& dst = pyr[l];
    dst.width = (src.width + 1) / 2;
    dst.height = (src.height + 1) / 2;
    dst.rgb.assign(static_cast<std::size_t>(dst.width) * dst.height, Rgb{});
    dst.occupancy.assign(dst.rgb.size(), 0.0);
    for (int y = 0; y < dst.height; ++y) {
      for (int x = 0; x < dst.width; ++x) {
        Rgb sum;
        double occ = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int sx = 2 * x + dx, sy = 2 * y + dy;
            if (sx >= src.width || sy >= src.height) continue;
            const std::size_t s = static_cast<std::size_t>(sy) * src.width + sx;
            sum += src.rgb[s] * src.occupancy[s];
            occ += src.occupancy[s];
          }
        }
        const std::size_t d = static_cast<std::size_t>(y) * dst.width + x;
        dst.occupancy[d] = occ;
        dst.rgb[d] = occ > 0 ? sum * (1.0 / occ) : Rgb{};
      }
    }
  }
  return pyr;
}

std::vector<Contributor> contributor_set(const TextureGroup& tg, const SolverConfig& cfg, int pass_index,
                                         const LigPyramid* pyramid) {
  std::vector<Contributor> out;
  const auto lig = [&](std::size_t i) { return tg.lig_in.rgb(i); };

  switch (cfg.mode) {
    case SolveMode::full:
    case SolveMode::directional:
      for (std::size_t i : tg.occupied_patches()) out.push_back(make_contributor(tg, i, 1.0, lig(i)));
      return out;
    case SolveMode::subdiv:
      for (std::size_t i : tg.occupied_patches()) {
        const double alpha = tg.lig_in.texel(i)[3];
        if (alpha > 0) out.push_back(make_contributor(tg, i, alpha, lig(i)));
      }
      return out;
    default:
      break;
  }

  const int s = window_side(cfg);
  const int level = std::countr_zero(static_cast<unsigned>(s));
  if (cfg.mode == SolveMode::mipmapped) {
    if (!pyramid || static_cast<int>(pyramid->size()) <= level) {
      fail_usage("missing-mipmaps", "mipmapped sampling needs a lig_in pyramid of level " + std::to_string(level));
    }
  }
  const int wx_count = (tg.width + s - 1) / s, wy_count = (tg.height + s - 1) / s;
  std::vector<std::size_t> members;
  for (int wy = 0; wy < wy_count; ++wy) {
    for (int wx = 0; wx < wx_count; ++wx) {
      members.clear();
      for (int y = wy * s; y < std::min(tg.height, (wy + 1) * s); ++y) {
        for (int x = wx * s; x < std::min(tg.width, (wx + 1) * s); ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * tg.width + x;
          if (tg.occupied(i)) members.push_back(i);
        }
      }
      if (members.empty()) continue;
      const std::uint64_t window = static_cast<std::uint64_t>(wy) * wx_count + wx;
      switch (cfg.mode) {
        case SolveMode::stride:
          out.push_back(make_contributor(tg, members.front(), cfg.window_m, lig(members.front())));
          break;
        case SolveMode::monte_carlo: {
          const std::size_t pick = members[window_hash(cfg.seed, window, pass_index) % members.size()];
          out.push_back(make_contributor(tg, pick, cfg.window_m, lig(pick)));
          break;
        }
        case SolveMode::mipmapped: {
          const LigLevel& lv = (*pyramid)[level];
          const std::size_t p = static_cast<std::size_t>(wy) * lv.width + wx;
          out.push_back(make_contributor(tg, members.front(), lv.occupancy[p], lv.rgb[p]));
          break;
        }
        default:
          break;
      }
    }
  }
  return out;
}

std::vector<WeightedPatch> select_contributors(const TextureGroup& tg, const SolverConfig& cfg, PatchId shooter,
                                               int pass_index) {
  LigPyramid pyr;
  if (cfg.mode == SolveMode::mipmapped) pyr = build_lig_mipmaps(tg, std::countr_zero(static_cast<unsigned>(window_side(cfg))));
  std::vector<WeightedPatch> out;
  for (const Contributor& c : contributor_set(tg, cfg, pass_index, &pyr)) {
    if (c.id.linear != shooter.linear) out.push_back({c.id, c.weight});
  }
  return out;
}

}  // namespace texrad
