#include "texrad/metrics_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "texrad/error.hpp"

namespace texrad {

Lightmap make_lightmap(int width, int height) {
  return {Image(width, height, 3), std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)};
}

Lightmap lightmap_from(const Image& lighting, const TextureGroup& tg) {
  Lightmap map = make_lightmap(tg.width, tg.height);
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    map.mask[i] = tg.occupied(i) ? 1 : 0;
    map.rgb.set_rgb(i, lighting.rgb(i));
  }
  return map;
}

Lightmap lightmap_from(const Image& img) {
  if (img.channels() < 3) fail_data("bad-channels", "a lightmap needs at least 3 channels");
  Lightmap map = make_lightmap(img.width(), img.height());
  for (std::size_t i = 0; i < img.texel_count(); ++i) {
    map.rgb.set_rgb(i, img.rgb(i));
    map.mask[i] = img.channels() >= 4 ? (img.texel(i)[3] > 0 ? 1 : 0) : 1;
  }
  return map;
}

double dfpr(const Lightmap& candidate, const Lightmap& reference, bool masked) {
  if (candidate.width() != reference.width() || candidate.height() != reference.height()) {
    fail_usage("resolution-mismatch", "dfpr needs equal resolutions");
  }
  const std::size_t n = candidate.rgb.texel_count();
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (masked && !(candidate.mask[i] && reference.mask[i])) continue;
    sum += length(candidate.rgb.rgb(i) - reference.rgb.rgb(i));
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::vector<std::uint8_t> quantize_rgb8(const Image& img, double clamp_to) {
  if (!(clamp_to > 0)) fail_usage("bad-clamp", "PNG clamp must be positive");
  if (img.channels() < 3) fail_usage("bad-channels", "PNG export needs at least 3 channels");
  std::vector<std::uint8_t> out(img.texel_count() * 3);
  for (std::size_t i = 0; i < img.texel_count(); ++i) {
    const float* p = img.texel(i);
    for (int c = 0; c < 3; ++c) {
      const double v = std::min(static_cast<double>(p[c]) / clamp_to, 1.0);
      out[i * 3 + c] = v > 0 ? static_cast<std::uint8_t>(std::floor(255.0 * v + 0.5)) : 0;
    }
  }
  return out;
}

Image upscale_bilinear(const Image& img, int factor) {
  if (factor < 1) fail_usage("bad-upscale", "upscale factor must be >= 1");
  if (factor == 1) return img;
  const int w = img.width(), h = img.height(), ch = img.channels();
  Image out(w * factor, h * factor, ch);
  for (int y = 0; y < out.height(); ++y) {
    const double sy = std::clamp((y + 0.5) / factor - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(sy), y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out.width(); ++x) {
      const double sx = std::clamp((x + 0.5) / factor - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(sx), x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - x0;
      for (int c = 0; c < ch; ++c) {
        const double top = img.texel(x0, y0)[c] * (1 - fx) + img.texel(x1, y0)[c] * fx;
        const double bottom = img.texel(x0, y1)[c] * (1 - fx) + img.texel(x1, y1)[c] * fx;
        out.texel(x, y)[c] = static_cast<float>(top * (1 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

void export_png(const Image& img, const std::filesystem::path& path, double clamp_to, int upscale) {
  const Image src = upscale_bilinear(img, upscale);
  const std::vector<std::uint8_t> bytes = quantize_rgb8(src, clamp_to);
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!file) fail_data("unwritable-file", "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::internal, "png", "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail_data("png-write", "libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(src.width()), static_cast<png_uint_32>(src.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < src.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * src.width() * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_rtex(const Image& img, const std::filesystem::path& path) {
  std::vector<char> buf = {'R', 'T', 'E', 'X'};
  put_u32(buf, static_cast<std::uint32_t>(img.width()));
  put_u32(buf, static_cast<std::uint32_t>(img.height()));
  put_u32(buf, static_cast<std::uint32_t>(img.channels()));
  buf.reserve(buf.size() + img.data().size() * 4);
  for (float f : img.data()) put_u32(buf, std::bit_cast<std::uint32_t>(f));
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_data("unwritable-file", "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail_data("unwritable-file", "failed writing " + path.string());
}

Image read_rtex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_data("unreadable-file", "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16) fail_data("truncated-rtex", path.string() + ": header is truncated");
  if (std::memcmp(bytes.data(), "RTEX", 4) != 0) fail_data("bad-magic", path.string() + ": not an RTEX file");
  const std::uint64_t w = get_u32(&bytes[4]), h = get_u32(&bytes[8]), c = get_u32(&bytes[12]);
  const std::uint64_t floats = w * h * c;
  if (bytes.size() - 16 < floats * 4) fail_data("truncated-rtex", path.string() + ": payload is truncated");
  if (bytes.size() - 16 > floats * 4) fail_data("oversized-rtex", path.string() + ": trailing bytes after payload");
  Image img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
  auto data = img.data();
  for (std::uint64_t k = 0; k < floats; ++k) data[k] = std::bit_cast<float>(get_u32(&bytes[16 + 4 * k]));
  return img;
}

nlohmann::ordered_json report_json(const PassReport& report, const nlohmann::ordered_json& config) {
  return {{"pass", report.pass},
          {"mode", std::string(to_string(report.mode))},
          {"rays_traced", report.rays_traced},
          {"raymarches", report.raymarches},
          {"cache_hits", report.cache_hits},
          {"batches", report.batches},
          {"wall_ms", report.wall_ms},
          {"energy_sum", report.energy_sum},
          {"config", config}};
}

}  // namespace texrad
