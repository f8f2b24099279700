#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "texrad/solver.hpp"
#include "texrad/texture_group.hpp"

namespace texrad {

// RGB lightmap with an occupancy mask (1 = patch).
struct Lightmap {
  Image rgb;  // 3 channels
  std::vector<std::uint8_t> mask;

  int width() const { return rgb.width(); }
  int height() const { return rgb.height(); }
};

Lightmap make_lightmap(int width, int height);
// RGB of `lighting` (lig_in after a pass) masked by the texture group's occupancy.
Lightmap lightmap_from(const Image& lighting, const TextureGroup& tg);
// First three channels of `img`; the mask comes from a fourth channel when present, else all ones.
Lightmap lightmap_from(const Image& img);

// Mean Euclidean RGB distance over all texels, or only over texels occupied in both maps when `masked`.
// Throws a usage error for mismatched resolutions.
double dfpr(const Lightmap& candidate, const Lightmap& reference, bool masked = false);

// 8-bit RGB PNG of the first three channels, each channel round-half-up of 255 min(v / clamp_to, 1).
// `upscale` > 1 magnifies bilinearly by that integer factor before quantization.
void export_png(const Image& img, const std::filesystem::path& path, double clamp_to = 1.0, int upscale = 1);
inline void export_png(const Lightmap& map, const std::filesystem::path& path, double clamp_to = 1.0, int upscale = 1) {
  export_png(map.rgb, path, clamp_to, upscale);
}
// Quantized bytes as written by export_png (row-major RGB), for checks without decoding a PNG.
std::vector<std::uint8_t> quantize_rgb8(const Image& img, double clamp_to);
// Bilinear magnification by an integer factor, sampling texel centers with clamped edges.
Image upscale_bilinear(const Image& img, int factor);

// `.rtex`: `RTEX`, u32 LE width, height, channels, then row-major float32 LE.
void write_rtex(const Image& img, const std::filesystem::path& path);
Image read_rtex(const std::filesystem::path& path);

// Pass report as one JSON object; `config` is embedded verbatim.
nlohmann::ordered_json report_json(const PassReport& report, const nlohmann::ordered_json& config);

}  // namespace texrad
