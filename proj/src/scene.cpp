#include "texrad/scene.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "texrad/error.hpp"
#include "texrad/raster.hpp"

namespace texrad {

namespace {

bool in_unit_range(Vec2 uv) { return uv.x >= 0 && uv.x <= 1 && uv.y >= 0 && uv.y <= 1; }

// Renormalizes only when the input is not already unit length, so re-saving a loaded scene is exact.
Vec3 unit_normal(Vec3 n) {
  const double len = length(n);
  if (std::abs(len - 1.0) <= 1e-12) return n;
  return n / len;
}

Rgb parse_rgb(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) fail_data("bad-material", what + " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Material> load_materials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail_data("unreadable-file", "cannot open material table " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail_data("bad-material", "material table " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) fail_data("bad-material", "material table must be a JSON array");
  std::vector<Material> out;
  for (const auto& m : doc) {
    try {
      Material mat;
      mat.name = m.at("name").get<std::string>();
      mat.albedo = parse_rgb(m.at("albedo"), "albedo");
      mat.emission = m.contains("emission") ? parse_rgb(m.at("emission"), "emission") : Rgb{};
      out.push_back(std::move(mat));
    } catch (const nlohmann::json::exception& e) {
      fail_data("bad-material", std::string("material entry: ") + e.what());
    }
  }
  return out;
}

struct FaceCorner {
  long v = 0, vt = 0, vn = 0;
};

long resolve_index(long idx, std::size_t count, int line_no) {
  const long n = static_cast<long>(count);
  const long r = idx < 0 ? n + idx : idx - 1;
  if (idx == 0 || r < 0 || r >= n) {
    fail_data("bad-index", "line " + std::to_string(line_no) + ": index " + std::to_string(idx) + " out of range");
  }
  return r;
}

FaceCorner parse_corner(const std::string& tok, int line_no) {
  FaceCorner c;
  long* slots[3] = {&c.v, &c.vt, &c.vn};
  std::size_t start = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = tok.find('/', start);
    const std::string part = tok.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (part.empty()) {
      if (k == 1) fail_data("missing-uv", "line " + std::to_string(line_no) + ": vertex without vt record");
      if (k == 2) fail_data("missing-normal", "line " + std::to_string(line_no) + ": vertex without vn record");
      fail_data("bad-face", "line " + std::to_string(line_no) + ": malformed face corner '" + tok + "'");
    }
    const auto res = std::from_chars(part.data(), part.data() + part.size(), *slots[k]);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size()) {
      fail_data("bad-face", "line " + std::to_string(line_no) + ": malformed face corner '" + tok + "'");
    }
    if (end == std::string::npos) {
      if (k == 0) fail_data("missing-uv", "line " + std::to_string(line_no) + ": vertex without vt record");
      if (k == 1) fail_data("missing-normal", "line " + std::to_string(line_no) + ": vertex without vn record");
      break;
    }
    start = end + 1;
  }
  return c;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Scene::Scene(std::vector<Triangle> triangles, std::vector<Material> materials)
    : triangles_(std::move(triangles)), materials_(std::move(materials)) {
  for (const auto& m : materials_) {
    const Rgb a = m.albedo;
    if (!(a.r >= 0 && a.r <= 1 && a.g >= 0 && a.g <= 1 && a.b >= 0 && a.b <= 1)) {
      fail_data("bad-material", "material '" + m.name + "' albedo outside [0,1]");
    }
    const Rgb e = m.emission;
    if (!(std::isfinite(e.r) && std::isfinite(e.g) && std::isfinite(e.b)) || e.r < 0 || e.g < 0 || e.b < 0) {
      fail_data("bad-material", "material '" + m.name + "' emission must be finite and non-negative");
    }
  }
  for (std::size_t i = 0; i < triangles_.size(); ++i) {
    const Triangle& t = triangles_[i];
    if (t.material_index < 0 || t.material_index >= static_cast<int>(materials_.size())) {
      fail_data("bad-material", "triangle " + std::to_string(i) + " references unknown material");
    }
    for (const Vertex* v : {&t.v1, &t.v2, &t.v3}) {
      if (!isfinite(v->position) || !isfinite(v->normal)) {
        fail_data("non-finite", "triangle " + std::to_string(i) + " has non-finite vertex data");
      }
      if (!in_unit_range(v->uv)) fail_data("uv-range", "triangle " + std::to_string(i) + " has uv outside [0,1]");
      if (length(v->normal) == 0) fail_data("zero-normal", "triangle " + std::to_string(i) + " has a zero normal");
    }
    if (!(t.world_area() > 0)) fail_data("degenerate-triangle", "triangle " + std::to_string(i) + " has zero area");
    bounds_.extend(t.bounds());
  }
}

Scene load_scene(const std::filesystem::path& path, SceneFormat format) {
  if (format != SceneFormat::obj_subset) fail_usage("bad-format", "unsupported scene format");
  std::ifstream in(path);
  if (!in) fail_data("unreadable-file", "cannot open scene " + path.string());

  std::vector<Vec3> positions, normals;
  std::vector<Vec2> uvs;
  struct RawFace {
    FaceCorner c[3];
    std::string material;
    int line = 0;
  };
  std::vector<RawFace> faces;
  std::string current_material;
  std::filesystem::path material_path = path.parent_path() / (path.stem().string() + ".materials.json");

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v" || tag == "vn") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) fail_data("bad-record", "line " + std::to_string(line_no) + ": bad " + tag);
      (tag == "v" ? positions : normals).push_back(p);
    } else if (tag == "vt") {
      Vec2 t;
      if (!(ls >> t.x >> t.y)) fail_data("bad-record", "line " + std::to_string(line_no) + ": bad vt");
      uvs.push_back(t);
    } else if (tag == "f") {
      std::vector<std::string> toks;
      for (std::string tok; ls >> tok;) toks.push_back(tok);
      if (toks.size() != 3) {
        fail_data("non-triangle-face", "line " + std::to_string(line_no) + ": face has " + std::to_string(toks.size()) +
                                           " corners, only triangles are supported");
      }
      RawFace f;
      for (int k = 0; k < 3; ++k) f.c[k] = parse_corner(toks[k], line_no);
      f.material = current_material;
      f.line = line_no;
      faces.push_back(f);
    } else if (tag == "usemtl") {
      ls >> current_material;
    } else if (tag == "mtllib") {
      std::string name;
      ls >> name;
      material_path = path.parent_path() / name;
    }
    // o, g, s and anything else carry no data we use.
  }
  if (faces.empty()) fail_data("empty-scene", "scene " + path.string() + " has no faces");

  std::vector<Material> materials = load_materials(material_path);
  std::unordered_map<std::string, int> by_name;
  for (std::size_t i = 0; i < materials.size(); ++i) by_name.emplace(materials[i].name, static_cast<int>(i));

  std::vector<Triangle> tris;
  tris.reserve(faces.size());
  for (const RawFace& f : faces) {
    const auto it = by_name.find(f.material);
    if (it == by_name.end()) {
      fail_data("bad-material", "line " + std::to_string(f.line) + ": unknown material '" + f.material + "'");
    }
    Triangle t;
    Vertex* vs[3] = {&t.v1, &t.v2, &t.v3};
    for (int k = 0; k < 3; ++k) {
      vs[k]->position = positions[resolve_index(f.c[k].v, positions.size(), f.line)];
      vs[k]->uv = uvs[resolve_index(f.c[k].vt, uvs.size(), f.line)];
      vs[k]->normal = unit_normal(normals[resolve_index(f.c[k].vn, normals.size(), f.line)]);
    }
    t.material_index = it->second;
    tris.push_back(t);
  }
  return Scene(std::move(tris), std::move(materials));
}

void save_scene(const Scene& scene, const std::filesystem::path& obj_path) {
  const std::string mtl_name = obj_path.stem().string() + ".materials.json";
  std::ofstream out(obj_path);
  if (!out) fail_data("unwritable-file", "cannot write " + obj_path.string());
  out << "mtllib " << mtl_name << "\n";
  std::size_t idx = 1;
  int current = -1;
  for (const Triangle& t : scene.triangles()) {
    for (const Vertex* v : {&t.v1, &t.v2, &t.v3}) {
      out << "v " << format_double(v->position.x) << ' ' << format_double(v->position.y) << ' '
          << format_double(v->position.z) << "\n";
      out << "vt " << format_double(v->uv.x) << ' ' << format_double(v->uv.y) << "\n";
      out << "vn " << format_double(v->normal.x) << ' ' << format_double(v->normal.y) << ' '
          << format_double(v->normal.z) << "\n";
    }
    if (t.material_index != current) {
      current = t.material_index;
      out << "usemtl " << scene.materials()[current].name << "\n";
    }
    out << "f";
    for (int k = 0; k < 3; ++k, ++idx) out << ' ' << idx << '/' << idx << '/' << idx;
    out << "\n";
  }

  nlohmann::json mats = nlohmann::json::array();
  for (const Material& m : scene.materials()) {
    mats.push_back({{"name", m.name},
                    {"albedo", {m.albedo.r, m.albedo.g, m.albedo.b}},
                    {"emission", {m.emission.r, m.emission.g, m.emission.b}}});
  }
  std::ofstream mout(obj_path.parent_path() / mtl_name);
  if (!mout) fail_data("unwritable-file", "cannot write material table for " + obj_path.string());
  mout << mats.dump(2) << "\n";
}

std::vector<UvOverlap> validate_uv_layout(const Scene& scene, int width, int height) {
  if (width < 1 || height < 1) fail_usage("bad-resolution", "resolution must be >= 1");
  std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
  std::vector<UvOverlap> reports;
  const auto& tris = scene.triangles();
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const Triangle& t = tris[i];
    auto to_px = [&](Vec2 uv) { return Vec2{uv.x * width, uv.y * height}; };
    rasterize_triangle(to_px(t.v1.uv), to_px(t.v2.uv), to_px(t.v3.uv), width, height,
                       [&](int x, int y, double, double, double) {
                         int& o = owner[static_cast<std::size_t>(y) * width + x];
                         if (o >= 0) reports.push_back({x, y, o, static_cast<int>(i)});
                         else o = static_cast<int>(i);
                       });
  }
  return reports;
}

std::vector<UvOverlap> validate_uv_layout(const Scene& scene, int resolution) {
  return validate_uv_layout(scene, resolution, resolution);
}

}  // namespace texrad
