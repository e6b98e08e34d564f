#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "topogen/growth.hpp"
#include "topogen/metrics.hpp"
#include "topogen/pipeline.hpp"
#include "topogen/rips.hpp"
#include "topogen/sampling.hpp"
#include "topogen/seeds.hpp"
#include "topogen/topology.hpp"
#include "topogen/wfc.hpp"

namespace py = pybind11;
using namespace topogen;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Array points_to_numpy(const std::vector<Vec3>& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = pts[i][k];
  return a;
}

std::vector<Vec3> numpy_to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw std::invalid_argument("expected an (n, 3) array");
  auto r = a.unchecked<2>();
  std::vector<Vec3> pts(a.shape(0));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[i] = Vec3(r(i, 0), r(i, 1), r(i, 2));
  return pts;
}

std::vector<int> to_ints(const IntArray& a) {
  return std::vector<int>(a.data(), a.data() + a.size());
}

py::dict summary_dict(const TopologySummary& s) {
  py::dict d;
  d["genera"] = s.genus_multiset();
  d["betti"] = s.scene_betti;
  d["chi"] = s.scene_chi;
  return d;
}

py::dict cloud_dict(const LabeledCloud& c) {
  py::dict d;
  d["points"] = points_to_numpy(c.points);
  d["genus"] = py::array_t<int>(c.genus_label.size(), c.genus_label.data());
  d["object_id"] = py::array_t<int>(c.object_id.size(), c.object_id.data());
  return d;
}

LabeledCloud cloud_from(const Array& points, const IntArray& genus, const IntArray& object_id) {
  LabeledCloud c;
  c.points = numpy_to_points(points);
  c.genus_label = to_ints(genus);
  c.object_id = to_ints(object_id);
  if (c.genus_label.size() != c.size() || c.object_id.size() != c.size())
    throw std::invalid_argument("label arrays must match the point count");
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topology-controlled scene generation";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<InconsistencyError>(m, "InconsistencyError", PyExc_RuntimeError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<PlacementError>(m, "PlacementError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_ValueError);

  py::class_<TriangleMesh>(m, "Mesh")
      .def(py::init<>())
      .def(py::init([](const Array& v, const IntArray& t) {
             TriangleMesh mesh;
             mesh.vertices = numpy_to_points(v);
             if (t.ndim() != 2 || t.shape(1) != 3) throw std::invalid_argument("expected (m, 3) triangles");
             auto r = t.unchecked<2>();
             for (py::ssize_t i = 0; i < t.shape(0); ++i) mesh.triangles.push_back({r(i, 0), r(i, 1), r(i, 2)});
             check_indices(mesh);
             return mesh;
           }),
           py::arg("vertices"), py::arg("triangles"))
      .def_property_readonly("vertices", [](const TriangleMesh& mesh) { return points_to_numpy(mesh.vertices); })
      .def_property_readonly("triangles",
                             [](const TriangleMesh& mesh) {
                               py::array_t<int> a({static_cast<py::ssize_t>(mesh.triangles.size()), py::ssize_t{3}});
                               auto w = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
                                 for (int k = 0; k < 3; ++k) w(i, k) = mesh.triangles[i][k];
                               return a;
                             })
      .def("euler_characteristic", &euler_characteristic)
      .def("component_count", &component_count)
      .def("surface_area", &surface_area)
      .def("self_intersections", [](const TriangleMesh& mesh) { return detect_self_intersections(mesh).size(); })
      .def("transformed", [](const TriangleMesh& mesh, double s, std::array<double, 3> t) {
             return transformed(mesh, s, Vec3(t[0], t[1], t[2]));
           }, py::arg("scale") = 1.0, py::arg("shift") = std::array<double, 3>{0, 0, 0})
      .def("save", [](const TriangleMesh& mesh, const std::string& path) { save_mesh(path, mesh); })
      .def_static("load", &load_mesh)
      .def("__repr__", [](const TriangleMesh& mesh) {
        return "<Mesh " + std::to_string(mesh.vertices.size()) + " vertices, " +
               std::to_string(mesh.triangles.size()) + " triangles>";
      });

  m.def("merge", &merge);
  m.def("make_seed", &make_seed, py::arg("genus"), py::arg("smoothing_rounds") = 3);
  m.def("make_linked_pair", [](int a, int b) { return make_linked_pair(a, b); });
  m.def("genus", &genus_of_component);
  m.def("scene_summary", [](const std::vector<TriangleMesh>& ms) { return summary_dict(scene_summary(ms)); });
  m.def("ambiguity_witness", [](const std::vector<TriangleMesh>& a, const std::vector<TriangleMesh>& b) {
    return ambiguity_witness(scene_summary(a), scene_summary(b));
  });
  m.def("betti_from_genera", &betti_from_genera);

  py::class_<OccupancyGrid>(m, "Environment")
      .def_property_readonly("shape", [](const OccupancyGrid& g) {
        return std::array<int, 3>{g.dims.nx, g.dims.ny, g.dims.nz};
      })
      .def_readonly("cell_size", &OccupancyGrid::cell_size)
      .def("occupied", [](const OccupancyGrid& g) {
        // indexed [z, y, x]
        py::array_t<bool> a({g.dims.nz, g.dims.ny, g.dims.nx});
        auto w = a.mutable_unchecked<3>();
        for (int z = 0; z < g.dims.nz; ++z)
          for (int y = 0; y < g.dims.ny; ++y)
            for (int x = 0; x < g.dims.nx; ++x) w(z, y, x) = g.occupied_at(x, y, z);
        return a;
      })
      .def("barrier_mesh", &barrier_mesh);

  m.def("empty_environment", [](std::array<int, 3> d, double cell) {
    return empty_environment({d[0], d[1], d[2]}, cell);
  }, py::arg("shape"), py::arg("cell_size") = 1.0);
  m.def("generate_environment",
        [](std::array<int, 3> d, std::uint64_t seed, double empty_weight, double cell) {
          const auto tiles = default_tileset();
          CollapseOptions opt;
          opt.weights.assign(tiles.size(), 1.0);
          opt.weights[0] = empty_weight;
          const auto grid = collapse({d[0], d[1], d[2]}, tiles, seed, opt);
          if (!audit_tiling(grid, tiles, BoundaryRule::Closed))
            throw GenerationError("tiling failed its audit");
          return voxelize(grid, tiles, cell);
        },
        py::arg("tiles") = std::array<int, 3>{6, 6, 6}, py::arg("seed") = 0,
        py::arg("empty_weight") = 30.0, py::arg("cell_size") = 1.0);

  m.def("place_seeds",
        [](const std::vector<int>& genera, const OccupancyGrid& env, std::uint64_t seed,
           const std::vector<std::pair<int, int>>& links, double scale) {
          std::vector<SeedSpec> specs;
          for (int g : genera) specs.push_back({g, std::nullopt, scale});
          for (auto [a, b] : links) {
            if (a < 0 || b < 0 || a >= static_cast<int>(specs.size()) || b >= static_cast<int>(specs.size()))
              throw std::invalid_argument("link index out of range");
            specs[a].linked_to = b;
            specs[b].linked_to = a;
          }
          return place_seeds(specs, env, seed).meshes;
        },
        py::arg("genera"), py::arg("env"), py::arg("seed") = 0,
        py::arg("links") = std::vector<std::pair<int, int>>{}, py::arg("scale") = 0.5);

  m.def("tangent_point_energy", &tangent_point_energy);
  m.def("grow",
        [](const std::vector<TriangleMesh>& meshes, const OccupancyGrid* env, int iterations,
           std::uint64_t seed, const std::vector<int>& stages, double w_area, double w_rep, double w_env) {
          GrowthConfig cfg;
          cfg.max_iterations = iterations;
          cfg.rng_seed = seed;
          cfg.w_area = w_area;
          cfg.w_rep = w_rep;
          cfg.w_env = w_env;
          cfg.validate();
          GrowthResult r;
          {
            py::gil_scoped_release release;
            r = grow(meshes, env, cfg, stages);
          }
          std::vector<py::dict> trace;
          for (const auto& rec : r.trace.records) {
            py::dict d;
            d["iteration"] = rec.iteration;
            d["area"] = rec.area;
            d["energy"] = rec.repulsive_energy;
            d["chi"] = rec.chi;
            d["components"] = rec.component_count;
            d["accepted"] = rec.accepted;
            trace.push_back(d);
          }
          py::dict out;
          out["meshes"] = r.meshes;
          out["stages"] = r.stages;
          out["trace"] = trace;
          return out;
        },
        py::arg("meshes"), py::arg("env") = nullptr, py::arg("iterations") = 200, py::arg("seed") = 0,
        py::arg("stages") = std::vector<int>{}, py::arg("w_area") = 1.0, py::arg("w_rep") = 0.2,
        py::arg("w_env") = 10.0);

  m.def("sample_cloud",
        [](const std::vector<TriangleMesh>& meshes, std::optional<std::vector<int>> genera, std::size_t n,
           std::uint64_t seed) {
          std::vector<int> g;
          if (genera) {
            g = *genera;
          } else {
            for (const auto& mesh : meshes) g.push_back(genus_of_component(mesh));
          }
          return cloud_dict(sample_cloud(meshes, g, n, seed));
        },
        py::arg("meshes"), py::arg("genera") = py::none(), py::arg("n") = 4096, py::arg("seed") = 0);

  m.def("augment",
        [](const Array& points, const IntArray& genus, const IntArray& object_id, std::uint64_t seed,
           double mirror_prob, double rotation_max, double scale_spread, double shift_range, double jitter_sigma) {
          AugmentConfig a;
          a.rng_seed = seed;
          a.mirror_prob = mirror_prob;
          a.rotation_max = rotation_max;
          a.scale_spread = scale_spread;
          a.shift_range = shift_range;
          a.jitter_sigma = jitter_sigma;
          return cloud_dict(augment(cloud_from(points, genus, object_id), a));
        },
        py::arg("points"), py::arg("genus"), py::arg("object_id"), py::arg("seed") = 0,
        py::arg("mirror_prob") = 0.5, py::arg("rotation_max") = 2.0 * std::numbers::pi,
        py::arg("scale_spread") = 0.5, py::arg("shift_range") = 25.0, py::arg("jitter_sigma") = 0.025);

  m.def("compute_metrics",
        [](const IntArray& gt, const IntArray& pred, int classes) {
          const auto r = compute_metrics(accumulate(to_ints(gt), to_ints(pred), classes));
          py::dict d;
          std::vector<std::optional<double>> iou, acc;
          for (const auto& c : r.per_class) {
            iou.push_back(c.iou);
            acc.push_back(c.acc);
          }
          d["iou"] = iou;
          d["acc"] = acc;
          d["miou"] = r.miou;
          d["macc"] = r.macc;
          d["oa"] = r.oa;
          return d;
        },
        py::arg("gt"), py::arg("pred"), py::arg("classes") = 4);

  m.def("rips_barcode",
        [](const Array& points, double max_radius, std::size_t max_points) {
          const auto b = persistence(build_rips(numpy_to_points(points), max_radius, 2, max_points));
          std::vector<std::tuple<int, double, double>> out;
          for (const auto& iv : b.intervals) out.emplace_back(iv.dim, iv.birth, iv.death);
          return out;
        },
        py::arg("points"), py::arg("max_radius"), py::arg("max_points") = kDefaultRipsPointLimit);
  m.def("rips_betti",
        [](const Array& points, double radius, std::size_t max_points) {
          const auto b = betti_at(persistence(build_rips(numpy_to_points(points), radius, 2, max_points)),
                                  radius);
          return std::pair<int, int>{b.b0, b.b1};
        },
        py::arg("points"), py::arg("radius"), py::arg("max_points") = kDefaultRipsPointLimit);

  m.def("generate_dataset",
        [](const std::string& config_json, const std::string& out) {
          const auto cfg = dataset_config_from_json(nlohmann::json::parse(config_json));
          cfg.validate();
          PipelineResult r;
          {
            py::gil_scoped_release release;
            r = run_pipeline(cfg, out);
          }
          py::dict d;
          d["ok"] = r.ok_per_split;
          d["failures"] = r.failures;
          return d;
        },
        py::arg("config_json"), py::arg("out"));
  m.def("verify_dataset", [](const std::string& manifest) {
    std::vector<std::tuple<int, bool, std::string>> out;
    for (const auto& l : verify_dataset(manifest)) out.emplace_back(l.scene_id, l.pass, l.detail);
    return out;
  });
}
