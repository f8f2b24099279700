// texrad: lightmap baking front end.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>

#include "texrad/bake.hpp"
#include "texrad/directions.hpp"
#include "texrad/error.hpp"
#include "texrad/metrics_io.hpp"

namespace {

using texrad::BakeConfig;

// Binds a flag to a temporary and records how to apply it once the config file has been read.
class Overrides {
 public:
  template <class T, class Apply>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Apply apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    entries_.push_back({opt, [value, apply](BakeConfig& c) { apply(c, *value); }});
    return opt;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help, std::function<void(BakeConfig&)> apply) {
    CLI::Option* opt = app->add_flag(name, help);
    entries_.push_back({opt, std::move(apply)});
    return opt;
  }
  void apply(BakeConfig& cfg) const {
    for (const auto& e : entries_) {
      if (e.option->count() > 0) e.apply(cfg);
    }
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(BakeConfig&)> apply;
  };
  std::vector<Entry> entries_;
};

double parse_real(const std::string& s) {
  if (s == "inf" || s == "off") return INFINITY;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) texrad::fail_usage("bad-number", "'" + s + "' is not a number");
  return v;
}

int exit_code(texrad::ErrorKind kind) {
  switch (kind) {
    case texrad::ErrorKind::usage:
      return 1;
    case texrad::ErrorKind::data:
      return 2;
    default:
      return 3;
  }
}

std::vector<double> nearest_neighbor_distances(const std::vector<texrad::Vec3>& dirs) {
  std::vector<double> nn(dirs.size(), INFINITY);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (i != j) nn[i] = std::min(nn[i], texrad::length(dirs[i] - dirs[j]));
    }
  }
  return nn;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPU progressive radiosity lightmap baker"};
  app.require_subcommand(1);

  // bake
  CLI::App* bake = app.add_subcommand("bake", "bake a lightmap");
  std::string config_path;
  bake->add_option("--config", config_path, "JSON config file; flags override its values");
  Overrides ov;
  ov.add<std::string>(bake, "--scene", "scene OBJ", [](BakeConfig& c, const std::string& v) { c.scene = v; });
  ov.add<int>(bake, "--res", "square lightmap resolution", [](BakeConfig& c, int v) { c.width = c.height = v; });
  ov.add<int>(bake, "--width", "lightmap width", [](BakeConfig& c, int v) { c.width = v; });
  ov.add<int>(bake, "--height", "lightmap height", [](BakeConfig& c, int v) { c.height = v; });
  ov.add<std::string>(bake, "--mode", "full|stride|monte_carlo|mipmapped|subdiv|directional",
                      [](BakeConfig& c, const std::string& v) { c.solver.mode = texrad::parse_mode(v); });
  CLI::Option* window = ov.add<int>(bake, "--window", "patches per sample (1, 4, 16, 64, 256)",
                                    [](BakeConfig& c, int v) { c.solver.window_m = v; });
  ov.add<int>(bake, "--passes", "radiosity passes", [](BakeConfig& c, int v) { c.solver.passes = v; });
  ov.add<std::string>(bake, "--rho", "reflectivity factor",
                      [](BakeConfig& c, const std::string& v) { c.solver.reflectivity = parse_real(v); });
  ov.add<std::string>(bake, "--clamp", "per-addend contribution clamp, or 'off'",
                      [](BakeConfig& c, const std::string& v) { c.solver.contribution_clamp = parse_real(v); });
  ov.add<std::string>(bake, "--ff-clamp", "form factor clamp",
                      [](BakeConfig& c, const std::string& v) { c.solver.form_factor_clamp = parse_real(v); });
  ov.add<std::string>(bake, "--distance-factor", "distance scale in the form factor",
                      [](BakeConfig& c, const std::string& v) { c.solver.distance_factor = parse_real(v); });
  ov.add<std::string>(bake, "--epsilon", "ray offset (0 = 1e-4 of the scene diagonal)",
                      [](BakeConfig& c, const std::string& v) { c.solver.epsilon = parse_real(v); });
  ov.add<std::string>(bake, "--threshold", "quad-tree gradient threshold",
                      [](BakeConfig& c, const std::string& v) { c.solver.gradient_threshold = parse_real(v); });
  ov.add<int>(bake, "--max-node", "largest quad-tree node (2, 4, 8, 16)", [](BakeConfig& c, int v) { c.solver.max_node = v; });
  ov.add<std::string>(bake, "--visibility", "traced|voxel|hybrid|cached",
                      [](BakeConfig& c, const std::string& v) { c.solver.visibility = texrad::parse_visibility(v); });
  ov.add<std::string>(bake, "--hybrid-ratio", "share of queries answered by the voxel map",
                      [](BakeConfig& c, const std::string& v) { c.solver.hybrid_ratio = parse_real(v); });
  ov.add<int>(bake, "--voxel-res", "voxel grid resolution", [](BakeConfig& c, int v) { c.solver.voxel_resolution = v; });
  ov.add<std::string>(bake, "--voxel-step", "raymarch step in cells",
                      [](BakeConfig& c, const std::string& v) { c.solver.voxel_step = parse_real(v); });
  ov.add<std::uint64_t>(bake, "--cache-bytes", "visibility cache capacity",
                        [](BakeConfig& c, std::uint64_t v) { c.solver.cache_capacity_bytes = v; });
  ov.add<std::uint64_t>(bake, "--batch", "rays per batch", [](BakeConfig& c, std::uint64_t v) { c.solver.batch_ray_limit = v; });
  ov.add<int>(bake, "--workers", "worker threads (0 = all cores)", [](BakeConfig& c, int v) { c.solver.workers = v; });
  ov.add<std::uint64_t>(bake, "--seed", "Monte-Carlo seed", [](BakeConfig& c, std::uint64_t v) { c.solver.seed = v; });
  ov.add<std::string>(bake, "--dirs", "direction table (directional mode)",
                      [](BakeConfig& c, const std::string& v) { c.directions = v; });
  ov.add<int>(bake, "--dir-count", "use the first N directions", [](BakeConfig& c, int v) { c.direction_count = v; });
  ov.add<int>(bake, "--blur", "mipmap level sampled at directional hits", [](BakeConfig& c, int v) { c.solver.blur_level = v; });
  ov.flag(bake, "--no-cosine", "drop the receiver cosine in directional mode",
          [](BakeConfig& c) { c.solver.directional_cosine = false; });
  ov.flag(bake, "--cull", "skip visibility queries whose contribution is zero",
          [](BakeConfig& c) { c.solver.cull_zero_terms = true; });
  ov.add<std::string>(bake, "--out", "output directory", [](BakeConfig& c, const std::string& v) { c.out_dir = v; });
  ov.add<std::string>(bake, "--report", "report path (default <out>/report.jsonl)",
                      [](BakeConfig& c, const std::string& v) { c.report = v; });
  ov.add<std::string>(bake, "--png-clamp", "value mapped to white",
                      [](BakeConfig& c, const std::string& v) { c.png_clamp = parse_real(v); });
  ov.add<int>(bake, "--png-upscale", "bilinear PNG magnification", [](BakeConfig& c, int v) { c.png_upscale = v; });
  bool quiet = false;
  bake->add_flag("--quiet", quiet, "do not echo pass reports");

  // gen-dirs
  CLI::App* gen = app.add_subcommand("gen-dirs", "generate an evenly spread direction table");
  int count = 1024;
  std::uint64_t seed = 0;
  std::string dirs_out;
  gen->add_option("--count", count, "number of directions (4..1024)");
  gen->add_option("--seed", seed, "seed of the 4 initial points");
  gen->add_option("--out", dirs_out, "output file")->required();

  // dfpr
  CLI::App* dfpr_cmd = app.add_subcommand("dfpr", "mean RGB distance between two .rtex lightmaps");
  std::string dfpr_a, dfpr_b;
  bool masked = false;
  dfpr_cmd->add_option("candidate", dfpr_a, "candidate .rtex")->required();
  dfpr_cmd->add_option("reference", dfpr_b, "reference .rtex")->required();
  dfpr_cmd->add_flag("--masked", masked, "average over texels occupied in both maps only");

  // inspect
  CLI::App* inspect = app.add_subcommand("inspect", "dump the texture group of a scene");
  std::string inspect_scene, inspect_out = "inspect_out";
  int inspect_res = 64;
  inspect->add_option("--scene", inspect_scene, "scene OBJ")->required();
  inspect->add_option("--res", inspect_res, "lightmap resolution");
  inspect->add_option("--out", inspect_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bake) {
      BakeConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) texrad::fail_data("unreadable-file", "cannot open config " + config_path);
        nlohmann::ordered_json j;
        try {
          j = nlohmann::json::parse(in);
        } catch (const nlohmann::ordered_json::exception& e) {
          texrad::fail_usage("bad-config", config_path + ": " + e.what());
        }
        texrad::apply_json(cfg, j);
      }
      ov.apply(cfg);
      if (window->count() > 0 && cfg.solver.mode != texrad::SolveMode::stride &&
          cfg.solver.mode != texrad::SolveMode::monte_carlo && cfg.solver.mode != texrad::SolveMode::mipmapped) {
        texrad::fail_usage("window-mode-mismatch", "--window applies to stride, monte_carlo and mipmapped modes only");
      }
      if (cfg.scene.empty()) texrad::fail_usage("no-scene", "bake needs --scene");
      texrad::run_bake(cfg, quiet ? nullptr : &std::cout);
    } else if (*gen) {
      const texrad::DirectionSet dirs = texrad::generate_directions(count, seed);
      texrad::write_directions(dirs, dirs_out);
      std::vector<double> nn = nearest_neighbor_distances(dirs.directions);
      std::sort(nn.begin(), nn.end());
      std::printf("directions=%zu min_nn=%.6f median_nn=%.6f\n", dirs.size(), nn.front(), nn[nn.size() / 2]);
    } else if (*dfpr_cmd) {
      const auto a = texrad::lightmap_from(texrad::read_rtex(dfpr_a));
      const auto b = texrad::lightmap_from(texrad::read_rtex(dfpr_b));
      std::printf("%.6f\n", texrad::dfpr(a, b, masked));
    } else if (*inspect) {
      for (const auto& f : texrad::run_inspect(inspect_scene, inspect_res, inspect_res, inspect_out)) {
        std::cout << f.string() << "\n";
      }
    }
  } catch (const texrad::Error& e) {
    std::cerr << "texrad: error [" << e.code() << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "texrad: internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
