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

// Command-line front end: dataset generation, homography tooling, warping,
// rasterization, training and evaluation.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bevplan/dataset.hpp"
#include "bevplan/error.hpp"
#include "bevplan/experiment.hpp"
#include "bevplan/geometry.hpp"
#include "bevplan/io.hpp"
#include "bevplan/metrics.hpp"
#include "bevplan/ogm.hpp"
#include "bevplan/planner_io.hpp"
#include "bevplan/render.hpp"
#include "bevplan/scene.hpp"

namespace fs = std::filesystem;
using bevplan::io::Json;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kDataError = 3, kNumeric = 4 };

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";
};

struct LoadedConfig {
  bevplan::SceneConfig scene;
  bevplan::ExperimentConfig experiment;
};

LoadedConfig LoadConfig(const Globals& g) {
  LoadedConfig c;
  if (g.config.empty()) return c;
  const Json j = bevplan::io::ReadJson(g.config);
  if (j.contains("scene")) c.scene = bevplan::io::SceneConfigFromJson(j.at("scene"));
  c.experiment = bevplan::io::ExperimentConfigFromJson(j);
  c.scene.Validate();
  return c;
}

// ---- gen -------------------------------------------------------------------

int CmdGen(const Globals& g, int n_scenes, double ratio) {
  const LoadedConfig cfg = LoadConfig(g);
  const auto m = bevplan::BuildDataset(n_scenes, ratio, g.seed, g.out, cfg.scene);
  std::cout << "wrote " << m.n_scenes << " scenes to " << g.out << ": " << m.split.train.size()
            << " train scenes (" << m.train_samples << " samples), " << m.split.test.size()
            << " test scenes (" << m.test_samples << " samples)\n";
  return kOk;
}

// ---- homography ------------------------------------------------------------

std::vector<bevplan::Correspondence> ReadPairs(const fs::path& path) {
  const Json j = bevplan::io::ReadJson(path);
  std::vector<bevplan::Correspondence> pairs;
  try {
    const Json& list = j.is_object() ? j.at("pairs") : j;
    for (const Json& p : list) {
      const auto cam = p.at("camera").get<std::vector<double>>();
      const auto bev = p.at("bev").get<std::vector<double>>();
      if (cam.size() != 2 || bev.size() != 2) {
        bevplan::Fail(bevplan::ErrorKind::kData, "each pair needs 2D camera and bev points");
      }
      pairs.push_back({{cam[0], cam[1]}, {bev[0], bev[1]}});
    }
  } catch (const Json::exception& e) {
    bevplan::Fail(bevplan::ErrorKind::kData, std::string("malformed correspondence file: ") + e.what());
  }
  return pairs;
}

/// Ground points of the scene's mask camera on a regular BEV lattice.
std::vector<bevplan::Correspondence> SceneCorrespondences(const bevplan::Scene& scene) {
  const bevplan::CameraModel cam = scene.MaskCamera();
  std::vector<bevplan::Correspondence> pairs;
  for (int r = 350; r <= 950; r += 75) {
    for (int c = 100; c <= 500; c += 50) {
      const bevplan::Vec2 grid(c, r);
      const bevplan::Vec2 ego = bevplan::GridToEgo(scene.grid, grid);
      const bevplan::Vec3 pc = cam.ToCamera({ego.x(), ego.y(), 0.0});
      if (pc.z() <= 1.0) continue;
      const bevplan::Vec2 px = cam.ProjectCameraPoint(pc);
      if (px.x() < 0 || px.y() < 0 || px.x() > cam.width() || px.y() > cam.height()) continue;
      pairs.push_back({px, grid});
    }
  }
  return pairs;
}

int CmdHomography(const Globals& g, const std::string& pairs_file, const std::string& scene_dir,
                  bool no_hartley) {
  std::vector<bevplan::Correspondence> pairs;
  std::optional<bevplan::Homography> reference;
  if (!pairs_file.empty()) {
    pairs = ReadPairs(pairs_file);
  } else {
    const bevplan::Scene scene = bevplan::io::SceneFromJson(bevplan::io::ReadJson(fs::path(scene_dir) / "scene.json"));
    pairs = SceneCorrespondences(scene);
    reference = bevplan::MaskHomography(scene.FullCamera(), scene.camera.mask_scale, scene.grid);
  }
  bevplan::DltOptions opts;
  opts.hartley_normalization = !no_hartley;
  const bevplan::Homography h = bevplan::EstimateHomographyDlt(pairs, opts);
  const auto residuals = bevplan::ReprojectionErrors(h, pairs);

  Json report;
  report["homography"] = bevplan::io::ToJson(h);
  report["pairs"] = pairs.size();
  report["condition_number"] = bevplan::DltConditionNumber(pairs, opts.hartley_normalization);
  Json res = Json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    res.push_back({{"camera", {pairs[i].camera.x(), pairs[i].camera.y()}},
                   {"bev", {pairs[i].bev.x(), pairs[i].bev.y()}},
                   {"residual", residuals[i]}});
  }
  report["residuals"] = res;
  report["max_residual"] = *std::max_element(residuals.begin(), residuals.end());
  if (reference) report["analytic_distance"] = bevplan::HomographyDistance(h.matrix(), reference->matrix());
  fs::create_directories(g.out);
  bevplan::io::WriteJson(fs::path(g.out) / "homography.json", report);
  std::cout << "max reprojection error " << report["max_residual"].get<double>() << " grid units over "
            << pairs.size() << " pairs\n";
  return kOk;
}

// ---- warp ------------------------------------------------------------------

int CmdWarp(const Globals& g, const std::string& input, const std::string& h_file, int rows,
            int cols, bool invert, bool nearest, double fill) {
  const bevplan::RealGrid src = bevplan::io::ReadPgm(input);
  bevplan::Homography h = bevplan::io::HomographyFromJson(bevplan::io::ReadJson(h_file));
  if (invert) h = h.Inverse();
  const auto w = bevplan::WarpGrid(src, h, rows, cols, fill,
                                   nearest ? bevplan::Interpolation::kNearest
                                           : bevplan::Interpolation::kBilinear);
  fs::create_directories(g.out);
  const std::string stem = fs::path(input).stem().string() + "_warped";
  const fs::path out = fs::path(g.out) / (stem + ".pgm");
  if (rows == bevplan::GridSpec{}.rows && cols == bevplan::GridSpec{}.cols) {
    bevplan::OccupancyGrid grid;
    grid.cells = w.values;
    grid.valid = w.valid;
    bevplan::io::WriteOccupancyGrid(out, grid);
  } else {
    bevplan::io::WritePgm(out, w.values);
    bevplan::io::WritePgm(fs::path(g.out) / (stem + "_valid.pgm"), w.valid);
  }
  std::cout << "wrote " << out.string() << '\n';
  return kOk;
}

// ---- rasterize -------------------------------------------------------------

int CmdRasterize(const Globals& g, const std::string& dataset, int scene_index, int frame,
                 const std::string& source) {
  const LoadedConfig cfg = LoadConfig(g);
  const bevplan::DatasetIndex index = bevplan::LoadDatasetIndex(dataset);
  const bevplan::SceneData data = bevplan::LoadSceneData(index, scene_index);
  if (frame < 0 || frame >= data.scene.frame_count()) {
    bevplan::Fail(bevplan::ErrorKind::kInvalidArgument, "frame outside the scene");
  }
  fs::create_directories(g.out);
  const bevplan::GridSpec& spec = data.scene.grid;
  {
    const int f = frame;
    const std::string stem = bevplan::FrameStem(f);
    bevplan::OccupancyGrid drv, veh;
    if (source == "bev") {
      drv = bevplan::BevDrivable(data.scene, f);
      veh = bevplan::BevVehicles(data.scene, f);
    } else {
      // Camera masks (optionally corrupted) warped to the grid, thresholded.
      const bevplan::CameraFrame& cam = data.frames[static_cast<std::size_t>(f)];
      const bevplan::MaskNoise noise = source == "camera-noisy" ? cfg.experiment.camera_noise : bevplan::MaskNoise{};
      const auto ch = [&](const bevplan::RealGrid& m, int c, bevplan::Channel tag) {
        const auto noisy = bevplan::CorruptMask(m, noise, bevplan::NoiseSeed(g.seed, scene_index, f, c));
        const auto w = bevplan::WarpGrid(noisy, cam.homography, spec.rows, spec.cols);
        bevplan::OccupancyGrid o;
        o.spec = spec;
        o.channel = tag;
        o.cells = bevplan::Threshold(w.values, 0.5);
        o.valid = w.valid;
        return o;
      };
      drv = ch(cam.drivable, 0, bevplan::Channel::kDrivable);
      veh = ch(cam.vehicles, 1, bevplan::Channel::kVehicle);
    }
    bevplan::io::WriteOccupancyGrid(fs::path(g.out) / (stem + "_drivable.pgm"), drv);
    bevplan::io::WriteOccupancyGrid(fs::path(g.out) / (stem + "_vehicles.pgm"), veh);
  }
  std::cout << "wrote 2 grids to " << g.out << '\n';
  return kOk;
}

// ---- train / eval-traj -----------------------------------------------------

int CmdTrain(const Globals& g, const std::string& dataset, const std::string& preset_name,
             int epochs) {
  LoadedConfig cfg = LoadConfig(g);
  if (epochs >= 0) cfg.experiment.hyper.epochs = epochs;
  const bevplan::ExperimentPreset preset = bevplan::FindPreset(preset_name);
  const bevplan::DatasetIndex index = bevplan::LoadDatasetIndex(dataset);
  const bevplan::PlannerConfig pc =
      bevplan::PresetPlannerConfig(preset, cfg.experiment, index.config.grid, index.config.camera);
  const auto train = bevplan::DatasetExamples(index, index.manifest.split.train, preset, cfg.experiment, g.seed);
  std::cerr << "training " << preset.name << " on " << train.size() << " samples\n";
  const auto result = bevplan::Train(train, pc, cfg.experiment.hyper, g.seed, [](int epoch, double loss) {
    if ((epoch + 1) % 20 == 0 || epoch == 0) std::cerr << "epoch " << epoch + 1 << " mean nll " << loss << '\n';
  });
  fs::create_directories(g.out);
  bevplan::io::SaveModel(fs::path(g.out) / "model.json", {preset.name, pc, result.params});
  bevplan::io::WriteText(fs::path(g.out) / "loss.csv", bevplan::io::LossCurveCsv(result.epoch_loss));
  std::cout << "wrote " << (fs::path(g.out) / "model.json").string() << '\n';
  return kOk;
}

int CmdEvalTraj(const Globals& g, const std::string& dataset, const std::string& model_file,
                const std::string& split_name) {
  const LoadedConfig cfg = LoadConfig(g);
  const bevplan::io::Model model = bevplan::io::LoadModel(model_file);
  const bevplan::ExperimentPreset preset = bevplan::FindPreset(model.preset);
  const bevplan::DatasetIndex index = bevplan::LoadDatasetIndex(dataset);
  const auto& scenes = split_name == "train" ? index.manifest.split.train : index.manifest.split.test;
  const auto examples = bevplan::DatasetExamples(index, scenes, preset, cfg.experiment, g.seed);
  if (examples.empty()) bevplan::Fail(bevplan::ErrorKind::kData, "split has no samples");
  const bevplan::TrajectoryError err = bevplan::EvaluatePlanner(examples, model.params, model.config);
  fs::create_directories(g.out);
  const std::string csv = bevplan::TrajectoryErrorCsv(model.preset, err, true);
  bevplan::io::WriteText(fs::path(g.out) / "trajectory_metrics.csv", csv);
  Json j = Json::array();
  for (const auto& h : err.horizons) {
    j.push_back({{"horizon_s", h.seconds}, {"ade", h.ade}, {"fde", h.fde},
                 {"l1_long", h.l1_long}, {"l1_lat", h.l1_lat}});
  }
  bevplan::io::WriteJson(fs::path(g.out) / "trajectory_metrics.json",
                         {{"preset", model.preset}, {"split", split_name},
                          {"samples", examples.size()}, {"horizons", j}});
  std::cout << csv;
  return kOk;
}

// ---- eval-ogm --------------------------------------------------------------

int CmdEvalOgm(const Globals& g, const std::string& pred_dir, const std::string& gt_dir) {
  std::vector<fs::path> gts;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    const fs::path& p = e.path();
    if (p.extension() == ".pgm" && fs::exists(fs::path(p).replace_extension(".json"))) gts.push_back(p);
  }
  std::sort(gts.begin(), gts.end());
  if (gts.empty()) bevplan::Fail(bevplan::ErrorKind::kData, "no grids with sidecars in " + gt_dir);
  using bevplan::RegionTag;
  const RegionTag regions[] = {RegionTag::kFull, RegionTag::kClose, RegionTag::kFar};
  std::map<std::pair<int, int>, bevplan::ConfusionCounts> counts;
  for (const fs::path& gt_path : gts) {
    const fs::path pred_path = fs::path(pred_dir) / gt_path.filename();
    if (!fs::exists(pred_path)) bevplan::Fail(bevplan::ErrorKind::kData, "missing prediction " + pred_path.string());
    const auto gt = bevplan::io::ReadOccupancyGrid(gt_path);
    const auto pred = bevplan::io::ReadOccupancyGrid(pred_path);
    for (int r = 0; r < 3; ++r) {
      counts[{r, static_cast<int>(gt.channel)}] +=
          bevplan::CountConfusion(pred, gt, bevplan::RegionBounds(gt.spec, regions[r]));
    }
  }
  std::ostringstream csv;
  csv << "region,drivable_iou,vehicle_iou\n";
  for (int r = 0; r < 3; ++r) {
    csv << bevplan::RegionName(regions[r]);
    for (int c = 0; c < 2; ++c) {
      const auto it = counts.find({r, c});
      csv << ',';
      if (it != counts.end()) csv << it->second.Iou();
    }
    csv << '\n';
  }
  fs::create_directories(g.out);
  bevplan::io::WriteText(fs::path(g.out) / "ogm_iou.csv", csv.str());
  std::cout << csv.str();
  return kOk;
}

// ---- render ----------------------------------------------------------------

int CmdRender(const Globals& g, const std::string& dataset, int scene_index, int frame,
              const std::string& model_file) {
  const LoadedConfig cfg = LoadConfig(g);
  const bevplan::DatasetIndex index = bevplan::LoadDatasetIndex(dataset);
  const bevplan::SceneData data = bevplan::LoadSceneData(index, scene_index);
  const auto it = std::find_if(data.samples.begin(), data.samples.end(),
                               [&](const auto& s) { return s.frame == frame; });
  if (it == data.samples.end()) {
    bevplan::Fail(bevplan::ErrorKind::kInvalidArgument, "frame has no sample (needs 6 past and 6 future frames)");
  }
  fs::create_directories(g.out);
  const fs::path out(g.out);
  const std::string stem = bevplan::FrameStem(frame);
  const auto& cam = data.frames[static_cast<std::size_t>(frame)];
  bevplan::io::WritePgm(out / (stem + "_camera_drivable.pgm"), cam.drivable);
  bevplan::io::WritePgm(out / (stem + "_camera_vehicles.pgm"), cam.vehicles);
  bevplan::io::WritePgm(out / (stem + "_bev_drivable.pgm"), bevplan::BevDrivable(data.scene, frame).cells);
  bevplan::io::WritePgm(out / (stem + "_bev_vehicles.pgm"), bevplan::BevVehicles(data.scene, frame).cells);
  std::vector<bevplan::GaussianParams> pred;
  if (!model_file.empty()) {
    const auto model = bevplan::io::LoadModel(model_file);
    const auto preset = bevplan::FindPreset(model.preset);
    bevplan::SceneData one = data;
    one.samples = {*it};
    const auto ex = bevplan::PresetExamples(one, preset, cfg.experiment, g.seed);
    pred = bevplan::Predict(ex.front(), model.params, model.config);
  }
  bevplan::io::WriteText(out / (stem + "_trajectory.svg"), bevplan::TrajectorySvg(*it, pred));
  std::cout << "wrote renders of scene " << scene_index << " frame " << frame << " to " << g.out << '\n';
  return kOk;
}

int ExitCodeFor(bevplan::ErrorKind kind) {
  switch (kind) {
    case bevplan::ErrorKind::kInvalidArgument:
      return kUsage;
    case bevplan::ErrorKind::kNumericFailure:
      return kNumeric;
    default:
      return kDataError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera to bird-eye-view occupancy grids and trajectory planning"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed of every random stream")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  int n_scenes = 10;
  double ratio = 0.8;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--scenes", n_scenes, "Number of scenes")->capture_default_str();
  gen->add_option("--ratio", ratio, "Fraction of scenes used for training")->capture_default_str();

  std::string pairs_file, scene_dir;
  bool no_hartley = false;
  auto* homog = app.add_subcommand("homography", "Estimate a homography by DLT");
  auto* pairs_opt = homog->add_option("--pairs", pairs_file, "Correspondence JSON")->check(CLI::ExistingFile);
  auto* scene_opt = homog->add_option("--scene", scene_dir, "Scene directory of a dataset")->check(CLI::ExistingDirectory);
  pairs_opt->excludes(scene_opt);
  homog->add_flag("--no-hartley", no_hartley, "Skip point normalization");

  std::string input, h_file;
  int rows = 1000, cols = 550;
  bool invert = false, nearest = false;
  double fill = 0.0;
  auto* warp = app.add_subcommand("warp", "Warp a PGM grid by a homography");
  warp->add_option("--input", input, "Source PGM")->required()->check(CLI::ExistingFile);
  warp->add_option("--homography", h_file, "Homography JSON (source to destination)")->required()->check(CLI::ExistingFile);
  warp->add_option("--rows", rows)->capture_default_str();
  warp->add_option("--cols", cols)->capture_default_str();
  warp->add_option("--fill", fill)->capture_default_str();
  warp->add_flag("--invert", invert, "Use the inverse homography");
  warp->add_flag("--nearest", nearest, "Nearest-neighbour sampling");

  std::string dataset;
  int scene_index = 0, frame = 5;
  std::string source = "bev";
  auto* raster = app.add_subcommand("rasterize", "Write the BEV grids of one frame");
  raster->add_option("--dataset", dataset)->required()->check(CLI::ExistingDirectory);
  raster->add_option("--scene", scene_index)->capture_default_str();
  raster->add_option("--frame", frame)->capture_default_str();
  raster->add_option("--source", source, "bev, camera or camera-noisy")
      ->check(CLI::IsMember({"bev", "camera", "camera-noisy"}))->capture_default_str();

  std::string preset;
  int epochs = -1;
  auto* train = app.add_subcommand("train", "Train the planner with a preset");
  train->add_option("--dataset", dataset)->required()->check(CLI::ExistingDirectory);
  train->add_option("--preset", preset)->required();
  train->add_option("--epochs", epochs, "Override the configured epoch count");

  std::string pred_dir, gt_dir;
  auto* eval_ogm = app.add_subcommand("eval-ogm", "IoU of predicted grids per region and channel");
  eval_ogm->add_option("--pred", pred_dir)->required()->check(CLI::ExistingDirectory);
  eval_ogm->add_option("--gt", gt_dir)->required()->check(CLI::ExistingDirectory);

  std::string model_file, split = "test";
  auto* eval_traj = app.add_subcommand("eval-traj", "Trajectory errors of a trained model");
  eval_traj->add_option("--dataset", dataset)->required()->check(CLI::ExistingDirectory);
  eval_traj->add_option("--model", model_file)->required()->check(CLI::ExistingFile);
  eval_traj->add_option("--split", split)->check(CLI::IsMember({"train", "test"}))->capture_default_str();

  auto* render = app.add_subcommand("render", "Masks and trajectory overlay of one sample");
  render->add_option("--dataset", dataset)->required()->check(CLI::ExistingDirectory);
  render->add_option("--scene", scene_index)->capture_default_str();
  render->add_option("--frame", frame)->capture_default_str();
  render->add_option("--model", model_file)->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return CmdGen(g, n_scenes, ratio);
    if (*homog) {
      if (pairs_file.empty() && scene_dir.empty()) {
        std::cerr << "homography: give --pairs or --scene\n";
        return kUsage;
      }
      return CmdHomography(g, pairs_file, scene_dir, no_hartley);
    }
    if (*warp) return CmdWarp(g, input, h_file, rows, cols, invert, nearest, fill);
    if (*raster) return CmdRasterize(g, dataset, scene_index, frame, source);
    if (*train) return CmdTrain(g, dataset, preset, epochs);
    if (*eval_ogm) return CmdEvalOgm(g, pred_dir, gt_dir);
    if (*eval_traj) return CmdEvalTraj(g, dataset, model_file, split);
    if (*render) return CmdRender(g, dataset, scene_index, frame, model_file);
  } catch (const bevplan::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
