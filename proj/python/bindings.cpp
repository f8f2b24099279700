// Python bindings for the baker. Images cross the boundary as float32 arrays of shape (h, w, c).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "texrad/bake.hpp"
#include "texrad/bvh.hpp"
#include "texrad/directions.hpp"
#include "texrad/error.hpp"
#include "texrad/fixtures.hpp"
#include "texrad/metrics_io.hpp"
#include "texrad/scene.hpp"
#include "texrad/solver.hpp"
#include "texrad/texture_group.hpp"
#include "texrad/voxel.hpp"

namespace py = pybind11;
using namespace texrad;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

FloatArray to_array(const Image& img) {
  FloatArray out({img.height(), img.width(), img.channels()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

Image from_array(const FloatArray& a) {
  if (a.ndim() != 3) throw Error(ErrorKind::usage, "bad-shape", "expected an array of shape (h, w, c)");
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), static_cast<int>(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), img.data().begin());
  return img;
}

Vec3 vec3(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
std::array<double, 3> arr(Vec3 v) { return {v.x, v.y, v.z}; }

// Keys as in the bake report's "config" object, given as a JSON string from the Python side.
BakeConfig bake_config(const std::string& json) {
  BakeConfig cfg;
  if (!json.empty()) apply_json(cfg, nlohmann::ordered_json::parse(json));
  return cfg;
}

py::dict report_dict(const PassReport& r) {
  py::dict d;
  d["pass"] = r.pass;
  d["mode"] = std::string(to_string(r.mode));
  d["rays_traced"] = r.rays_traced;
  d["raymarches"] = r.raymarches;
  d["cache_hits"] = r.cache_hits;
  d["batches"] = r.batches;
  d["wall_ms"] = r.wall_ms;
  d["energy_sum"] = r.energy_sum;
  return d;
}

struct SolveResult {
  Image lighting;
  std::vector<PassReport> reports;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CPU progressive radiosity lightmap baker";

  static py::exception<Error> error(m, "TexradError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code, message)
      PyErr_SetObject(error.ptr(), py::make_tuple(e.code(), e.what()).ptr());
    }
  });

  py::class_<Material>(m, "Material")
      .def_readonly("name", &Material::name)
      .def_property_readonly("albedo", [](const Material& mt) { return std::array<double, 3>{mt.albedo.r, mt.albedo.g, mt.albedo.b}; })
      .def_property_readonly("emission",
                             [](const Material& mt) { return std::array<double, 3>{mt.emission.r, mt.emission.g, mt.emission.b}; });

  py::class_<Scene>(m, "Scene")
      .def_property_readonly("triangle_count", [](const Scene& s) { return s.triangles().size(); })
      .def_property_readonly("materials", &Scene::materials)
      .def_property_readonly("bounds", [](const Scene& s) { return py::make_tuple(arr(s.bounds().lo), arr(s.bounds().hi)); })
      .def("save", [](const Scene& s, const std::filesystem::path& p) { save_scene(s, p); });

  m.def("load_scene", [](const std::filesystem::path& p) { return load_scene(p); }, py::arg("path"));
  m.def("box_scene", [] { return fixtures::box_scene(); });
  m.def("uv_overlaps", [](const Scene& s, int res) { return validate_uv_layout(s, res).size(); }, py::arg("scene"),
        py::arg("resolution"));

  py::class_<TextureGroup>(m, "TextureGroup")
      .def_readonly("width", &TextureGroup::width)
      .def_readonly("height", &TextureGroup::height)
      .def_property_readonly("occupied_count", &TextureGroup::occupied_count)
      .def_property_readonly("pos", [](const TextureGroup& tg) { return to_array(tg.pos); })
      .def_property_readonly("nrm", [](const TextureGroup& tg) { return to_array(tg.nrm); })
      .def_property_readonly("mat", [](const TextureGroup& tg) { return to_array(tg.mat); })
      .def_property_readonly("arf", [](const TextureGroup& tg) { return to_array(tg.arf); })
      .def_property_readonly("emission", [](const TextureGroup& tg) { return to_array(tg.emission); })
      .def_property_readonly("lighting", [](const TextureGroup& tg) { return to_array(tg.lig_in); });
  m.def("build_texture_group", &build_texture_group, py::arg("scene"), py::arg("width"), py::arg("height"));

  py::class_<Bvh>(m, "Bvh")
      .def_property_readonly("depth", &Bvh::depth)
      .def("occluded",
           [](const Bvh& b, std::array<double, 3> a, std::array<double, 3> c, double eps) {
             return occluded(b, vec3(a), vec3(c), eps);
           },
           py::arg("a"), py::arg("b"), py::arg("epsilon"))
      .def("closest_hit",
           [](const Bvh& b, std::array<double, 3> o, std::array<double, 3> d, double t_min, double t_max) -> py::object {
             const auto h = b.closest_hit(Ray{vec3(o), normalize(vec3(d)), t_min, t_max});
             if (!h) return py::none();
             return py::make_tuple(h->t, h->u, h->v, h->triangle_index);
           },
           py::arg("origin"), py::arg("direction"), py::arg("t_min") = 0.0, py::arg("t_max") = INFINITY);
  m.def("build_bvh", [](const Scene& s) { return build_bvh(s); }, py::arg("scene"));
  m.def("default_epsilon", &default_epsilon, py::arg("scene"));

  py::class_<VoxelMap>(m, "VoxelMap")
      .def_property_readonly("resolution", &VoxelMap::resolution)
      .def_property_readonly("count", &VoxelMap::count)
      .def("occluded",
           [](const VoxelMap& vm, std::array<double, 3> a, std::array<double, 3> b, double step) {
             return raymarch_occluded(vm, vec3(a), vec3(b), step);
           },
           py::arg("a"), py::arg("b"), py::arg("step") = 0.5);
  m.def("voxelize", [](const Scene& s, int r) { return voxelize(s, r); }, py::arg("scene"), py::arg("resolution"));

  m.def("generate_directions",
        [](int count, std::uint64_t seed) {
          const DirectionSet d = generate_directions(count, seed);
          py::array_t<double> out({static_cast<py::ssize_t>(d.size()), py::ssize_t{3}});
          auto v = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < d.size(); ++i) {
            v(i, 0) = d.directions[i].x;
            v(i, 1) = d.directions[i].y;
            v(i, 2) = d.directions[i].z;
          }
          return out;
        },
        py::arg("count"), py::arg("seed") = 0);

  m.def("cantor", &cantor, py::arg("x"), py::arg("y"));
  m.def("pair_address",
        [](std::size_t a, std::size_t b, int width, int height) {
          return pair_address(PatchId::from_linear(a, width), PatchId::from_linear(b, width),
                              static_cast<std::size_t>(width) * height);
        },
        py::arg("a"), py::arg("b"), py::arg("width"), py::arg("height"));

  py::class_<SolveResult>(m, "SolveResult")
      .def_property_readonly("lighting", [](const SolveResult& r) { return to_array(r.lighting); })
      .def_property_readonly("reports", [](const SolveResult& r) {
        py::list out;
        for (const auto& rep : r.reports) out.append(report_dict(rep));
        return out;
      });

  m.def("solve",
        [](const Scene& s, const std::string& config_json, const std::filesystem::path& dirs) {
          const BakeConfig cfg = bake_config(config_json);
          TextureGroup tg = build_texture_group(s, cfg.width, cfg.height);
          DirectionSet d;
          if (!dirs.empty()) d = read_directions(dirs);
          if (cfg.direction_count > 0) d = d.prefix(static_cast<std::size_t>(cfg.direction_count));
          SolveResult r;
          {
            py::gil_scoped_release release;
            ProgressiveSolver solver(s, tg, cfg.solver, &d);
            r.reports = solver.run();
          }
          r.lighting = tg.lig_in;
          return r;
        },
        py::arg("scene"), py::arg("config_json") = "", py::arg("directions") = std::filesystem::path());

  m.def("classical_solve",
        [](const Scene& s, int res, int bounces, const std::string& config_json) {
          const BakeConfig cfg = bake_config(config_json);
          const TextureGroup tg = build_texture_group(s, res, res);
          return to_array(classical_solve(tg, build_bvh(s), bounces, cfg.solver));
        },
        py::arg("scene"), py::arg("resolution"), py::arg("bounces"), py::arg("config_json") = "");

  m.def("bake",
        [](const std::string& config_json) {
          const BakeConfig cfg = bake_config(config_json);
          BakeResult res;
          {
            py::gil_scoped_release release;
            res = run_bake(cfg);
          }
          py::list reports;
          for (const auto& r : res.reports) reports.append(report_dict(r));
          return py::make_tuple(reports, res.files);
        },
        py::arg("config_json"));

  m.def("inspect", &run_inspect, py::arg("scene"), py::arg("width"), py::arg("height"), py::arg("out_dir"));

  m.def("dfpr",
        [](const FloatArray& a, const FloatArray& b, bool masked) {
          return dfpr(lightmap_from(from_array(a)), lightmap_from(from_array(b)), masked);
        },
        py::arg("candidate"), py::arg("reference"), py::arg("masked") = false);
  m.def("read_rtex", [](const std::filesystem::path& p) { return to_array(read_rtex(p)); }, py::arg("path"));
  m.def("write_rtex", [](const FloatArray& a, const std::filesystem::path& p) { write_rtex(from_array(a), p); },
        py::arg("image"), py::arg("path"));
  m.def("export_png",
        [](const FloatArray& a, const std::filesystem::path& p, double clamp_to, int upscale) {
          export_png(from_array(a), p, clamp_to, upscale);
        },
        py::arg("image"), py::arg("path"), py::arg("clamp_to") = 1.0, py::arg("upscale") = 1);
}
