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

#include "bevplan/experiment.hpp"

#include <iterator>
#include <map>

#include "bevplan/error.hpp"
#include "bevplan/random.hpp"

namespace bevplan {

const std::vector<ExperimentPreset>& ExperimentPresets() {
  static const std::vector<ExperimentPreset> presets = {
      {"holistic", FeatureSource::kCameraWarped, true},
      {"holistic-np", FeatureSource::kCameraWarped, false},
      {"lstm-ed", FeatureSource::kNone, true},
      {"mid-to-end", FeatureSource::kBevClean, true},
      {"mid-to-end-np", FeatureSource::kBevClean, false},
      {"mid-to-end-corrupted", FeatureSource::kBevCorrupted, true},
      {"mid-to-end-corrupted-np", FeatureSource::kBevCorrupted, false},
      {"holistic-cv", FeatureSource::kCameraView, true},
      {"holistic-cv-np", FeatureSource::kCameraView, false},
  };
  return presets;
}

ExperimentPreset FindPreset(const std::string& name) {
  for (const ExperimentPreset& p : ExperimentPresets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const ExperimentPreset& p : ExperimentPresets()) known += (known.empty() ? "" : ", ") + p.name;
  Fail(ErrorKind::kInvalidArgument, "unknown preset '" + name + "' (known: " + known + ")");
}

void ExperimentConfig::Validate() const {
  if (cv_downsample < 1) Fail(ErrorKind::kInvalidArgument, "cv_downsample must be at least 1");
  for (const MaskNoise* n : {&camera_noise, &bev_noise}) {
    if (!(n->dropout >= 0.0 && n->dropout < 1.0) || !(n->jitter_sigma >= 0.0) ||
        n->blur_radius < 0 || !(n->jitter_spacing > 0.0)) {
      Fail(ErrorKind::kInvalidArgument, "invalid mask noise parameters");
    }
  }
  planner.Validate();
}

PlannerConfig PresetPlannerConfig(const ExperimentPreset& preset, const ExperimentConfig& config,
                                  const GridSpec& grid, const CameraConfig& camera) {
  PlannerConfig c = config.planner;
  c.use_past = preset.use_past;
  c.use_grids = preset.source != FeatureSource::kNone;
  switch (preset.source) {
    case FeatureSource::kNone:
      c.feature_dim = 0;
      break;
    case FeatureSource::kCameraView:
      c.feature_dim = FeatureLength(camera.image_height / camera.mask_scale,
                                    camera.image_width / camera.mask_scale, config.cv_downsample);
      break;
    default:
      c.feature_dim = FeatureLength(grid.rows, grid.cols, c.downsample);
  }
  c.Validate();
  return c;
}

std::uint64_t NoiseSeed(std::uint64_t seed, int scene, int frame, int channel) {
  std::uint64_t h = SplitMix64(seed ^ 0x6e6f697365ULL);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(scene));
  h = SplitMix64(h ^ static_cast<std::uint64_t>(frame));
  return SplitMix64(h ^ static_cast<std::uint64_t>(channel));
}

GridFrame PresetFrame(const SceneData& data, int frame, const ExperimentPreset& preset,
                      const ExperimentConfig& config, std::uint64_t noise_seed) {
  if (frame < 0 || frame >= static_cast<int>(data.frames.size())) {
    Fail(ErrorKind::kInvalidArgument, "frame outside the scene");
  }
  const GridSpec& spec = data.scene.grid;
  const CameraFrame& cam = data.frames[static_cast<std::size_t>(frame)];
  auto camera_channel = [&](const RealGrid& mask, int channel) {
    return CorruptMask(mask, config.camera_noise, NoiseSeed(noise_seed, data.index, frame, channel));
  };
  GridFrame out;
  switch (preset.source) {
    case FeatureSource::kNone:
      break;
    case FeatureSource::kCameraWarped:
      out.drivable = WarpGrid(camera_channel(cam.drivable, 0), cam.homography, spec.rows, spec.cols).values;
      out.vehicles = WarpGrid(camera_channel(cam.vehicles, 1), cam.homography, spec.rows, spec.cols).values;
      break;
    case FeatureSource::kCameraView:
      out.drivable = camera_channel(cam.drivable, 0);
      out.vehicles = camera_channel(cam.vehicles, 1);
      break;
    case FeatureSource::kBevClean:
    case FeatureSource::kBevCorrupted: {
      out.drivable = BevDrivable(data.scene, frame).cells;
      out.vehicles = BevVehicles(data.scene, frame).cells;
      if (preset.source == FeatureSource::kBevCorrupted) {
        out.drivable = CorruptMask(out.drivable, config.bev_noise, NoiseSeed(noise_seed, data.index, frame, 2));
        out.vehicles = CorruptMask(out.vehicles, config.bev_noise, NoiseSeed(noise_seed, data.index, frame, 3));
      }
      break;
    }
  }
  return out;
}

std::vector<PlannerExample> PresetExamples(const SceneData& data, const ExperimentPreset& preset,
                                           const ExperimentConfig& config,
                                           std::uint64_t noise_seed) {
  const int downsample =
      preset.source == FeatureSource::kCameraView ? config.cv_downsample : config.planner.downsample;
  std::map<int, Eigen::VectorXd> features;
  std::vector<PlannerExample> out;
  for (const TrajectorySample& s : data.samples) {
    PlannerExample ex;
    ex.trajectory = s;
    if (preset.source != FeatureSource::kNone) {
      for (int k = s.frame - kPastSteps + 1; k <= s.frame; ++k) {
        auto it = features.find(k);
        if (it == features.end()) {
          it = features.emplace(k, FeaturizeFrame(PresetFrame(data, k, preset, config, noise_seed), downsample)).first;
        }
        ex.features.push_back(it->second);
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<PlannerExample> DatasetExamples(const DatasetIndex& index, std::span<const int> scenes,
                                            const ExperimentPreset& preset,
                                            const ExperimentConfig& config, std::uint64_t noise_seed) {
  std::vector<PlannerExample> out;
  for (int s : scenes) {
    auto ex = PresetExamples(LoadSceneData(index, s), preset, config, noise_seed);
    out.insert(out.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
  }
  return out;
}

std::vector<Trajectory> PredictMeans(std::span<const PlannerExample> examples,
                                     const PlannerParams& params, const PlannerConfig& config) {
  std::vector<Trajectory> out;
  for (const auto& steps : PredictBatch(examples, params, config)) {
    Trajectory t;
    for (const GaussianParams& g : steps) t.push_back(g.mean());
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trajectory> GroundTruth(std::span<const PlannerExample> examples, int horizon) {
  std::vector<Trajectory> out;
  for (const PlannerExample& ex : examples) {
    out.emplace_back(ex.trajectory.future.begin(), ex.trajectory.future.begin() + horizon);
  }
  return out;
}

TrajectoryError EvaluatePlanner(std::span<const PlannerExample> examples,
                                const PlannerParams& params, const PlannerConfig& config) {
  const auto preds = PredictMeans(examples, params, config);
  const auto gts = GroundTruth(examples, config.horizon);
  return EvaluateTrajectories(preds, gts);
}

}  // namespace bevplan
