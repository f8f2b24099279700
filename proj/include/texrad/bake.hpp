#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "texrad/solver.hpp"

namespace texrad {

struct BakeConfig {
  std::filesystem::path scene;
  int width = 64, height = 64;
  SolverConfig solver;
  std::filesystem::path out_dir = "bake_out";
  std::filesystem::path directions;  // direction table, directional mode only
  int direction_count = 0;           // use the first N directions of the table; 0 = all
  std::filesystem::path report;      // defaults to <out_dir>/report.jsonl
  double png_clamp = 1.0;
  int png_upscale = 1;
};

// Full resolved configuration, including defaults. Infinite clamps are written as "inf".
nlohmann::ordered_json to_json(const BakeConfig& cfg);
// Overrides the fields present in `j`; unknown keys are a usage error.
void apply_json(BakeConfig& cfg, const nlohmann::ordered_json& j);

struct BakeResult {
  std::vector<PassReport> reports;
  std::vector<std::filesystem::path> files;
};

// load -> texture group -> solver passes -> per-pass PNG (seams sewn) and .rtex (solver state, RGB +
// occupancy) -> JSON-lines report. Errors are rethrown with the failing stage prepended.
BakeResult run_bake(const BakeConfig& cfg, std::ostream* log = nullptr);

// Writes pos, nrm, mat, arf and emission as PNG and .rtex pairs. Returns the written paths.
std::vector<std::filesystem::path> run_inspect(const std::filesystem::path& scene, int width, int height,
                                               const std::filesystem::path& out_dir);

}  // namespace texrad
