#include <atomic>

#include "texrad/error.hpp"
#include "texrad/solver.hpp"

namespace texrad {

std::uint64_t cantor(std::uint64_t x, std::uint64_t y) {
  using u128 = unsigned __int128;
  const u128 s = static_cast<u128>(x) + y;
  const u128 v = static_cast<u128>(x) + s * (s + 1) / 2;
  if (v > static_cast<u128>(UINT64_MAX)) fail_usage("cantor-overflow", "cantor pairing exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t pair_address(PatchId a, PatchId b, std::size_t n) {
  if (a.linear == b.linear) fail_usage("self-pair", "pair_address needs two distinct patches");
  if (a.linear >= n || b.linear >= n) fail_usage("bad-index", "patch index out of range for pair_address");
  const std::uint64_t lo = std::min(a.linear, b.linear), hi = std::max(a.linear, b.linear);
  return cantor(n - 1 - hi, lo);
}

VisCache::VisCache(std::size_t patch_count, std::uint64_t capacity_bytes) : n_(patch_count) {
  if (patch_count < 2) return;
  const unsigned __int128 pairs = static_cast<unsigned __int128>(patch_count) * (patch_count - 1) / 2;
  if (pairs > static_cast<unsigned __int128>(capacity_bytes) * 8) return;
  words_.assign(static_cast<std::size_t>((pairs + 63) / 64), 0);
}

std::optional<std::uint64_t> VisCache::address(PatchId a, PatchId b) const {
  if (!enabled()) return std::nullopt;
  return pair_address(a, b, n_);
}

bool VisCache::visible(std::uint64_t address) const {
  const std::uint64_t w = std::atomic_ref<std::uint64_t>(const_cast<std::uint64_t&>(words_[address >> 6])).load(std::memory_order_relaxed);
  return (w >> (address & 63)) & 1u;
}

void VisCache::store_visible(std::uint64_t address) {
  std::atomic_ref<std::uint64_t>(words_[address >> 6]).fetch_or(std::uint64_t{1} << (address & 63), std::memory_order_relaxed);
}

bool pair_visible(const Bvh& bvh, const TextureGroup& tg, PatchId a, PatchId b, double epsilon,
                  const OcclusionProbe* probe_a, const OcclusionProbe* probe_b) {
  const bool from_a = a.linear < b.linear;
  const std::size_t origin = from_a ? a.linear : b.linear, target = from_a ? b.linear : a.linear;
  const OcclusionProbe* probe = from_a ? probe_a : probe_b;
  return probe ? !probe->occluded(tg.position(target))
               : !occluded(bvh, tg.position(origin), tg.position(target), epsilon);
}

bool cached_visibility(VisCache& cache, const Bvh& bvh, PatchId a, PatchId b, const TextureGroup& tg,
                       bool first_pass, double epsilon, PassCounters& counters, const OcclusionProbe* probe_a,
                       const OcclusionProbe* probe_b) {
  const auto addr = cache.address(a, b);
  if (addr && !first_pass) {
    ++counters.cache_hits;
    return cache.visible(*addr);
  }
  ++counters.rays_traced;
  const bool vis = pair_visible(bvh, tg, a, b, epsilon, probe_a, probe_b);
  if (addr && vis) cache.store_visible(*addr);
  return vis;
}

}  // namespace texrad
