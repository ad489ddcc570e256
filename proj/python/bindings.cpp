// Copyright 2026 The bevplan Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Grids cross the boundary as float64 numpy arrays,
// configs as JSON strings (the Python package wraps them as dicts).

#include <filesystem>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bevplan/dataset.hpp"
#include "bevplan/error.hpp"
#include "bevplan/experiment.hpp"
#include "bevplan/geometry.hpp"
#include "bevplan/io.hpp"
#include "bevplan/metrics.hpp"
#include "bevplan/ogm.hpp"
#include "bevplan/planner.hpp"
#include "bevplan/planner_io.hpp"
#include "bevplan/scene.hpp"

namespace py = pybind11;
using namespace bevplan;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

RealGrid ToGrid(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2D array");
  RealGrid g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), g.data());
  return g;
}

template <typename T>
py::array_t<T> ToArray(const Grid<T>& g) {
  py::array_t<T> a({g.rows(), g.cols()});
  std::copy(g.data(), g.data() + g.size(), a.mutable_data());
  return a;
}

std::vector<Vec2> ToPoints(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("expected an (N, 2) array");
  std::vector<Vec2> pts;
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts.emplace_back(a.at(i, 0), a.at(i, 1));
  return pts;
}

Array FromPoints(const std::vector<Vec2>& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<py::ssize_t>(i), 0) = pts[i].x();
    m(static_cast<py::ssize_t>(i), 1) = pts[i].y();
  }
  return a;
}

std::vector<Trajectory> ToTrajectories(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) throw py::value_error("expected an (N, T, 2) array");
  std::vector<Trajectory> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (py::ssize_t t = 0; t < a.shape(1); ++t) out[static_cast<std::size_t>(i)].emplace_back(a.at(i, t, 0), a.at(i, t, 1));
  }
  return out;
}

OccupancyGrid ToOccupancy(const Array& a, Channel channel, const py::object& valid) {
  OccupancyGrid g = OccupancyGrid::Empty(GridSpec{}, channel);
  g.cells = ToGrid(a);
  if (!valid.is_none()) {
    const RealGrid v = ToGrid(valid.cast<Array>());
    MaskGrid m(v.rows(), v.cols());
    for (std::size_t i = 0; i < v.size(); ++i) m.data()[i] = v.data()[i] > 0.5;
    g.valid = m;
  }
  return g;
}

GaussianParams ToGaussian(const Eigen::VectorXd& v) {
  if (v.size() != 5) throw py::value_error("expected (mu_x, mu_y, sigma_x, sigma_y, rho)");
  return {v(0), v(1), v(2), v(3), v(4)};
}

SceneConfig SceneConfigFrom(const std::string& json) {
  return json.empty() ? SceneConfig{} : io::SceneConfigFromJson(io::Json::parse(json));
}

ExperimentConfig ExperimentConfigFrom(const std::string& json) {
  return json.empty() ? ExperimentConfig{} : io::ExperimentConfigFromJson(io::Json::parse(json));
}

}  // namespace

PYBIND11_MODULE(_bevplan, m) {
  m.doc() = "Camera-to-BEV occupancy grids and an LSTM trajectory planner";

  static py::exception<Error> error(m, "BevplanError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    } catch (const io::Json::exception& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  // geometry
  m.def(
      "estimate_homography",
      [](const Array& camera, const Array& bev, bool hartley) {
        const auto c = ToPoints(camera);
        const auto b = ToPoints(bev);
        if (c.size() != b.size()) throw py::value_error("camera and bev point counts differ");
        std::vector<Correspondence> pairs;
        for (std::size_t i = 0; i < c.size(); ++i) pairs.push_back({c[i], b[i]});
        DltOptions opts;
        opts.hartley_normalization = hartley;
        return Eigen::Matrix3d(EstimateHomographyDlt(pairs, opts).matrix());
      },
      py::arg("camera"), py::arg("bev"), py::arg("hartley") = true,
      "DLT homography mapping camera points to bev points, unit Frobenius norm.");
  m.def(
      "apply_homography",
      [](const Eigen::Matrix3d& h, const Array& points) {
        const Homography hh = Homography::FromMatrix(h);
        std::vector<Vec2> out;
        for (const Vec2& p : ToPoints(points)) out.push_back(ApplyHomography(hh, p));
        return FromPoints(out);
      },
      py::arg("h"), py::arg("points"));
  m.def(
      "rescale_homography",
      [](const Eigen::Matrix3d& h, double s) {
        return Eigen::Matrix3d(RescaleHomography(Homography::FromMatrix(h), s).matrix());
      },
      py::arg("h"), py::arg("s"));
  m.def(
      "ground_plane_homography",
      [](double height_m, double pitch_deg, double fov_deg, int width, int height) {
        constexpr double kDeg = 3.14159265358979323846 / 180.0;
        const CameraModel cam = CameraModel::Mounted(height_m, pitch_deg * kDeg, fov_deg * kDeg, width, height);
        return Eigen::Matrix3d(GroundPlaneHomography(cam, GridSpec{}).matrix());
      },
      py::arg("height_m") = 1.6, py::arg("pitch_deg") = -8.0, py::arg("fov_deg") = 70.0,
      py::arg("width") = 2560, py::arg("height") = 1440,
      "Image pixels to cells of the default 1000 x 550 grid.");
  m.def(
      "warp_grid",
      [](const Array& src, const Eigen::Matrix3d& h, int rows, int cols, double fill, bool nearest) {
        const WarpResult w = WarpGrid(ToGrid(src), Homography::FromMatrix(h), rows, cols, fill,
                                      nearest ? Interpolation::kNearest : Interpolation::kBilinear);
        return py::make_tuple(ToArray(w.values), ToArray(w.valid));
      },
      py::arg("src"), py::arg("h"), py::arg("rows"), py::arg("cols"), py::arg("fill") = 0.0,
      py::arg("nearest") = false, "Returns (values, valid).");
  m.def(
      "warp_mask",
      [](const Array& src, const Eigen::Matrix3d& h, int rows, int cols) {
        const WarpResult w = WarpMask(ToGrid(src), Homography::FromMatrix(h), rows, cols);
        return py::make_tuple(ToArray(w.values), ToArray(w.valid));
      },
      py::arg("src"), py::arg("h"), py::arg("rows"), py::arg("cols"));

  // occupancy grids
  m.def(
      "rasterize_polygons",
      [](const std::vector<Array>& polygons, int rows, int cols) {
        std::vector<Polygon> polys;
        for (const Array& p : polygons) polys.push_back(ToPoints(p));
        return ToArray(RasterizePolygons(polys, rows, cols));
      },
      py::arg("polygons"), py::arg("rows"), py::arg("cols"));
  m.def(
      "iou",
      [](const Array& pred, const Array& gt, const std::string& region, const py::object& valid) {
        return Iou(ToOccupancy(pred, Channel::kDrivable, valid), ToOccupancy(gt, Channel::kDrivable, py::none()),
                   ParseRegion(region));
      },
      py::arg("pred"), py::arg("gt"), py::arg("region") = "full", py::arg("valid") = py::none(),
      "IoU of two binary 1000 x 550 grids over a region (full, close or far).");
  m.def(
      "connected_components",
      [](const Array& grid) {
        const Components c = ConnectedComponents(ToGrid(grid));
        return py::make_tuple(ToArray(c.labels), c.count);
      },
      py::arg("grid"), "8-connected labels and the component count.");
  m.def(
      "featurize",
      [](const Array& drivable, const Array& vehicles, int downsample) {
        return Eigen::VectorXd(FeaturizeFrame({ToGrid(drivable), ToGrid(vehicles)}, downsample));
      },
      py::arg("drivable"), py::arg("vehicles"), py::arg("downsample") = 40);

  // scenes and datasets
  py::class_<Scene>(m, "Scene")
      .def_static(
          "generate",
          [](std::uint64_t seed, const std::string& config) { return GenerateScene(seed, SceneConfigFrom(config)); },
          py::arg("seed"), py::arg("config") = "")
      .def_property_readonly("frame_count", &Scene::frame_count)
      .def("to_json", [](const Scene& s) { return io::ToJson(s).dump(); })
      .def(
          "bev",
          [](const Scene& s, int frame) {
            return py::make_tuple(ToArray(BevDrivable(s, frame).cells), ToArray(BevVehicles(s, frame).cells));
          },
          py::arg("frame"), "Ground-truth (drivable, vehicles) grids.")
      .def(
          "camera_masks",
          [](const Scene& s, int frame) {
            const CameraFrame f = RenderMasks(s, frame);
            return py::make_tuple(ToArray(f.drivable), ToArray(f.vehicles), Eigen::Matrix3d(f.homography.matrix()));
          },
          py::arg("frame"), "(drivable, vehicles, mask-to-grid homography).")
      .def("sample_frames", &SampleFrames)
      .def(
          "sample",
          [](const Scene& s, int frame) { return io::ToJson(MakeTrajectorySample(s, frame)).dump(); },
          py::arg("frame"));

  m.def(
      "corrupt_mask",
      [](const Array& mask, double dropout, double jitter_sigma, int blur_radius, std::uint64_t seed) {
        return ToArray(CorruptMask(ToGrid(mask), MaskNoise{dropout, jitter_sigma, blur_radius, 16.0}, seed));
      },
      py::arg("mask"), py::arg("dropout") = 0.0, py::arg("jitter_sigma") = 0.0, py::arg("blur_radius") = 0,
      py::arg("seed") = 0);
  m.def(
      "build_dataset",
      [](int n_scenes, double ratio, std::uint64_t seed, const std::string& out, const std::string& config) {
        const DatasetManifest man = BuildDataset(n_scenes, ratio, seed, out, SceneConfigFrom(config));
        return py::make_tuple(man.train_samples, man.test_samples);
      },
      py::arg("n_scenes"), py::arg("ratio"), py::arg("seed"), py::arg("out"), py::arg("config") = "",
      "Writes a dataset; returns (train samples, test samples).");

  // planner
  m.def(
      "gaussian_nll", [](const Eigen::VectorXd& g, const Eigen::Vector2d& x) { return GaussianNll(ToGaussian(g), x); },
      py::arg("params"), py::arg("x"));
  m.def(
      "nll_loss",
      [](const Eigen::MatrixXd& params, const Array& gt) {
        std::vector<GaussianParams> g;
        for (Eigen::Index t = 0; t < params.rows(); ++t) g.push_back(ToGaussian(params.row(t).transpose()));
        return NllLoss(g, ToPoints(gt));
      },
      py::arg("params"), py::arg("gt"), "Summed NLL; params rows are (mu_x, mu_y, sigma_x, sigma_y, rho).");
  m.def(
      "ade", [](const Array& preds, const Array& gts, int horizon) {
        return Ade(ToTrajectories(preds), ToTrajectories(gts), horizon);
      },
      py::arg("preds"), py::arg("gts"), py::arg("horizon_steps"));
  m.def("presets", [] {
    std::vector<std::string> names;
    for (const ExperimentPreset& p : ExperimentPresets()) names.push_back(p.name);
    return names;
  });
  m.def(
      "train",
      [](const std::string& dataset, const std::string& preset_name, const std::string& model_out,
         std::uint64_t seed, int epochs, const std::string& config) {
        ExperimentConfig ec = ExperimentConfigFrom(config);
        if (epochs >= 0) ec.hyper.epochs = epochs;
        const ExperimentPreset preset = FindPreset(preset_name);
        const DatasetIndex index = LoadDatasetIndex(dataset);
        const PlannerConfig pc = PresetPlannerConfig(preset, ec, index.config.grid, index.config.camera);
        const auto examples = DatasetExamples(index, index.manifest.split.train, preset, ec, seed);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = Train(examples, pc, ec.hyper, seed);
        }
        io::SaveModel(model_out, {preset.name, pc, r.params});
        return r.epoch_loss;
      },
      py::arg("dataset"), py::arg("preset"), py::arg("model_out"), py::arg("seed") = 0, py::arg("epochs") = -1,
      py::arg("config") = "", "Trains on the train split and writes the model; returns per-epoch mean NLL.");
  m.def(
      "evaluate",
      [](const std::string& dataset, const std::string& model_path, const std::string& split, std::uint64_t seed,
         const std::string& config) {
        const ExperimentConfig ec = ExperimentConfigFrom(config);
        const io::Model model = io::LoadModel(model_path);
        const DatasetIndex index = LoadDatasetIndex(dataset);
        const auto& scenes = split == "train" ? index.manifest.split.train : index.manifest.split.test;
        const auto examples = DatasetExamples(index, scenes, FindPreset(model.preset), ec, seed);
        const TrajectoryError err = EvaluatePlanner(examples, model.params, model.config);
        py::list rows;
        for (const HorizonError& h : err.horizons) {
          py::dict d;
          d["horizon_s"] = h.seconds;
          d["ade"] = h.ade;
          d["fde"] = h.fde;
          d["l1_long"] = h.l1_long;
          d["l1_lat"] = h.l1_lat;
          rows.append(d);
        }
        return rows;
      },
      py::arg("dataset"), py::arg("model"), py::arg("split") = "test", py::arg("seed") = 0,
      py::arg("config") = "");
}
