#include "texrad/bake.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "texrad/error.hpp"
#include "texrad/metrics_io.hpp"

namespace texrad {

namespace {

template <class Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), e.code(), name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::internal, "internal", name + ": " + e.what());
  }
}

nlohmann::ordered_json real_or_inf(double v) { return std::isinf(v) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(v); }

double read_real(const nlohmann::ordered_json& v, const std::string& key) {
  if (v.is_string() && (v == "inf" || v == "off")) return INFINITY;
  if (!v.is_number()) fail_usage("bad-config", "config key '" + key + "' must be a number");
  return v.get<double>();
}

template <class T>
T read_int(const nlohmann::ordered_json& v, const std::string& key) {
  if (!v.is_number_integer()) fail_usage("bad-config", "config key '" + key + "' must be an integer");
  if constexpr (std::is_unsigned_v<T>) {
    if (v.is_number_unsigned()) return v.get<T>();
    if (v.get<long long>() < 0) fail_usage("bad-config", "config key '" + key + "' must be non-negative");
  }
  return v.get<T>();
}

std::string read_string(const nlohmann::ordered_json& v, const std::string& key) {
  if (!v.is_string()) fail_usage("bad-config", "config key '" + key + "' must be a string");
  return v.get<std::string>();
}

bool read_bool(const nlohmann::ordered_json& v, const std::string& key) {
  if (!v.is_boolean()) fail_usage("bad-config", "config key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::filesystem::path pass_file(const std::filesystem::path& dir, int pass, const char* ext) {
  return dir / ("lightmap_pass" + std::to_string(pass) + ext);
}

}  // namespace

nlohmann::ordered_json to_json(const BakeConfig& cfg) {
  const SolverConfig& s = cfg.solver;
  return {{"scene", cfg.scene.string()},
          {"width", cfg.width},
          {"height", cfg.height},
          {"mode", std::string(to_string(s.mode))},
          {"window", s.window_m},
          {"gradient_threshold", s.gradient_threshold},
          {"max_node", s.max_node},
          {"reflectivity", s.reflectivity},
          {"contribution_clamp", real_or_inf(s.contribution_clamp)},
          {"form_factor_clamp", real_or_inf(s.form_factor_clamp)},
          {"distance_factor", s.distance_factor},
          {"epsilon", s.epsilon},
          {"batch_ray_limit", s.batch_ray_limit},
          {"visibility", std::string(to_string(s.visibility))},
          {"hybrid_ratio", s.hybrid_ratio},
          {"voxel_resolution", s.voxel_resolution},
          {"voxel_step", s.voxel_step},
          {"cache_capacity_bytes", s.cache_capacity_bytes},
          {"passes", s.passes},
          {"seed", s.seed},
          {"workers", s.workers},
          {"blur_level", s.blur_level},
          {"directional_cosine", s.directional_cosine},
          {"cull_zero_terms", s.cull_zero_terms},
          {"out_dir", cfg.out_dir.string()},
          {"directions", cfg.directions.string()},
          {"direction_count", cfg.direction_count},
          {"report", cfg.report.string()},
          {"png_clamp", cfg.png_clamp},
          {"png_upscale", cfg.png_upscale}};
}

void apply_json(BakeConfig& cfg, const nlohmann::ordered_json& j) {
  if (!j.is_object()) fail_usage("bad-config", "config file must hold a JSON object");
  SolverConfig& s = cfg.solver;
  for (const auto& [key, v] : j.items()) {
    if (key == "scene") cfg.scene = read_string(v, key);
    else if (key == "resolution") cfg.width = cfg.height = read_int<int>(v, key);
    else if (key == "width") cfg.width = read_int<int>(v, key);
    else if (key == "height") cfg.height = read_int<int>(v, key);
    else if (key == "mode") s.mode = parse_mode(read_string(v, key));
    else if (key == "window") s.window_m = read_int<int>(v, key);
    else if (key == "gradient_threshold") s.gradient_threshold = read_real(v, key);
    else if (key == "max_node") s.max_node = read_int<int>(v, key);
    else if (key == "reflectivity") s.reflectivity = read_real(v, key);
    else if (key == "contribution_clamp") s.contribution_clamp = read_real(v, key);
    else if (key == "form_factor_clamp") s.form_factor_clamp = read_real(v, key);
    else if (key == "distance_factor") s.distance_factor = read_real(v, key);
    else if (key == "epsilon") s.epsilon = read_real(v, key);
    else if (key == "batch_ray_limit") s.batch_ray_limit = read_int<std::uint64_t>(v, key);
    else if (key == "visibility") s.visibility = parse_visibility(read_string(v, key));
    else if (key == "hybrid_ratio") s.hybrid_ratio = read_real(v, key);
    else if (key == "voxel_resolution") s.voxel_resolution = read_int<int>(v, key);
    else if (key == "voxel_step") s.voxel_step = read_real(v, key);
    else if (key == "cache_capacity_bytes") s.cache_capacity_bytes = read_int<std::uint64_t>(v, key);
    else if (key == "passes") s.passes = read_int<int>(v, key);
    else if (key == "seed") s.seed = read_int<std::uint64_t>(v, key);
    else if (key == "workers") s.workers = read_int<int>(v, key);
    else if (key == "blur_level") s.blur_level = read_int<int>(v, key);
    else if (key == "directional_cosine") s.directional_cosine = read_bool(v, key);
    else if (key == "cull_zero_terms") s.cull_zero_terms = read_bool(v, key);
    else if (key == "out_dir") cfg.out_dir = read_string(v, key);
    else if (key == "directions") cfg.directions = read_string(v, key);
    else if (key == "direction_count") cfg.direction_count = read_int<int>(v, key);
    else if (key == "report") cfg.report = read_string(v, key);
    else if (key == "png_clamp") cfg.png_clamp = read_real(v, key);
    else if (key == "png_upscale") cfg.png_upscale = read_int<int>(v, key);
    else fail_usage("bad-config", "unknown config key '" + key + "'");
  }
}

BakeResult run_bake(const BakeConfig& cfg_in, std::ostream* log) {
  BakeConfig cfg = cfg_in;
  if (cfg.report.empty()) cfg.report = cfg.out_dir / "report.jsonl";
  stage("config", [&] {
    cfg.solver.validate(cfg.width, cfg.height);
    if (!(cfg.png_clamp > 0)) fail_usage("bad-clamp", "PNG clamp must be positive");
    if (cfg.png_upscale < 1) fail_usage("bad-upscale", "PNG upscale must be >= 1");
    if (cfg.solver.mode == SolveMode::directional && cfg.directions.empty()) {
      fail_usage("no-directions", "directional mode needs --dirs");
    }
    return 0;
  });

  const Scene scene = stage("load", [&] { return load_scene(cfg.scene); });
  TextureGroup tg = stage("texture group", [&] { return build_texture_group(scene, cfg.width, cfg.height); });
  DirectionSet dirs;
  if (cfg.solver.mode == SolveMode::directional) {
    dirs = stage("directions", [&] {
      DirectionSet d = read_directions(cfg.directions);
      if (cfg.direction_count < 0) fail_usage("bad-count", "direction count must be >= 0");
      return cfg.direction_count > 0 ? d.prefix(static_cast<std::size_t>(cfg.direction_count)) : d;
    });
  }
  if (cfg.solver.epsilon == 0 && !scene.empty()) cfg.solver.epsilon = default_epsilon(scene);

  stage("output", [&] {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.report.has_parent_path()) std::filesystem::create_directories(cfg.report.parent_path());
    return 0;
  });
  std::ofstream report(cfg.report);
  if (!report) throw Error(ErrorKind::data, "unwritable-file", "output: cannot write " + cfg.report.string());

  const nlohmann::ordered_json config = to_json(cfg);
  ProgressiveSolver solver = stage("solver setup", [&] { return ProgressiveSolver(scene, tg, cfg.solver, &dirs); });
  BakeResult result;
  for (int k = 0; k < cfg.solver.passes; ++k) {
    const PassReport r = stage("pass " + std::to_string(k + 1), [&] { return solver.run_pass(); });
    stage("export", [&] {
      const Image sewn = sew_seams(tg.lig_in, tg);
      const auto png = pass_file(cfg.out_dir, r.pass, ".png");
      const auto rtex = pass_file(cfg.out_dir, r.pass, ".rtex");
      export_png(sewn, png, cfg.png_clamp, cfg.png_upscale);
      write_rtex(tg.lig_in, rtex);
      result.files.push_back(png);
      result.files.push_back(rtex);
      return 0;
    });
    const nlohmann::ordered_json line = report_json(r, config);
    report << line.dump() << "\n";
    if (log) *log << line.dump() << "\n";
    result.reports.push_back(r);
  }
  return result;
}

std::vector<std::filesystem::path> run_inspect(const std::filesystem::path& scene_path, int width, int height,
                                               const std::filesystem::path& out_dir) {
  if (width < 1 || height < 1) fail_usage("bad-resolution", "resolution must be positive");
  const Scene scene = stage("load", [&] { return load_scene(scene_path); });
  const TextureGroup tg = stage("texture group", [&] { return build_texture_group(scene, width, height); });
  stage("output", [&] { return std::filesystem::create_directories(out_dir); });

  // Display copies mapped into [0, 1].
  Image pos(width, height, 3), nrm(width, height, 3), arf(width, height, 3);
  const Aabb b = scene.bounds();
  const Vec3 ext = b.extent();
  double max_area = 0, max_emission = 0;
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    max_area = std::max(max_area, tg.area(i));
    max_emission = std::max(max_emission, tg.emission.rgb(i).max_component());
  }
  for (std::size_t i = 0; i < tg.texel_count(); ++i) {
    if (!tg.occupied(i)) continue;
    const Vec3 p = tg.position(i) - b.lo, n = tg.normal(i);
    pos.set_rgb(i, {ext.x > 0 ? p.x / ext.x : 0, ext.y > 0 ? p.y / ext.y : 0, ext.z > 0 ? p.z / ext.z : 0});
    nrm.set_rgb(i, {n.x * 0.5 + 0.5, n.y * 0.5 + 0.5, n.z * 0.5 + 0.5});
    const double a = max_area > 0 ? tg.area(i) / max_area : 0;
    arf.set_rgb(i, {a, a, a});
  }

  struct Dump {
    const char* name;
    const Image& raw;
    const Image& display;
    double clamp;
  };
  const Dump dumps[] = {{"pos", tg.pos, pos, 1.0},
                        {"nrm", tg.nrm, nrm, 1.0},
                        {"mat", tg.mat, tg.mat, 1.0},
                        {"arf", tg.arf, arf, 1.0},
                        {"emission", tg.emission, tg.emission, max_emission > 0 ? max_emission : 1.0}};
  std::vector<std::filesystem::path> files;
  stage("export", [&] {
    for (const Dump& d : dumps) {
      const auto png = out_dir / (std::string(d.name) + ".png");
      const auto rtex = out_dir / (std::string(d.name) + ".rtex");
      export_png(d.display, png, d.clamp);
      write_rtex(d.raw, rtex);
      files.push_back(png);
      files.push_back(rtex);
    }
    return 0;
  });
  return files;
}

}  // namespace texrad
