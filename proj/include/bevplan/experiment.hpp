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

#pragma once

#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "bevplan/dataset.hpp"
#include "bevplan/metrics.hpp"
#include "bevplan/planner.hpp"
#include "bevplan/scene.hpp"

namespace bevplan {

/// What the planner sees at each input step.
enum class FeatureSource {
  kNone,           // past trajectory only
  kCameraWarped,   // corrupted camera masks warped to the BEV grid
  kBevClean,       // ground-truth BEV grids
  kBevCorrupted,   // ground-truth BEV grids with BEV-space corruption
  kCameraView,     // corrupted camera masks, pooled without warping
};

struct ExperimentPreset {
  std::string name;
  FeatureSource source = FeatureSource::kNone;
  bool use_past = true;
};

/// holistic, holistic-np, lstm-ed, mid-to-end, mid-to-end-np,
/// mid-to-end-corrupted, mid-to-end-corrupted-np, holistic-cv, holistic-cv-np.
const std::vector<ExperimentPreset>& ExperimentPresets();
/// Throws kInvalidArgument for unknown names.
ExperimentPreset FindPreset(const std::string& name);

struct ExperimentConfig {
  MaskNoise camera_noise{0.2, 4.0, 1, 16.0};
  MaskNoise bev_noise{0.2, 4.0, 1, 16.0};
  int cv_downsample = 25;  // camera-view pooling; 640 x 360 -> 25 x 14 blocks
  PlannerConfig planner;   // dims; inputs and feature_dim are set per preset
  TrainHyper hyper{.clip_norm = 10.0};  // plain SGD at lr 1e-3 diverges on these inputs

  void Validate() const;
};

PlannerConfig PresetPlannerConfig(const ExperimentPreset& preset, const ExperimentConfig& config,
                                  const GridSpec& grid, const CameraConfig& camera);

/// Seed of the corruption applied to one channel of one frame.
std::uint64_t NoiseSeed(std::uint64_t seed, int scene, int frame, int channel);

/// Two-channel input grid of `frame` as seen by `preset`; empty for kNone.
GridFrame PresetFrame(const SceneData& data, int frame, const ExperimentPreset& preset,
                      const ExperimentConfig& config, std::uint64_t noise_seed);

/// One example per sample of the scene, features computed once per frame.
std::vector<PlannerExample> PresetExamples(const SceneData& data, const ExperimentPreset& preset,
                                           const ExperimentConfig& config,
                                           std::uint64_t noise_seed);

/// PresetExamples of every listed scene of a dataset on disk, in order.
std::vector<PlannerExample> DatasetExamples(const DatasetIndex& index, std::span<const int> scenes,
                                            const ExperimentPreset& preset,
                                            const ExperimentConfig& config, std::uint64_t noise_seed);

/// Predicted means, one trajectory per example.
std::vector<Trajectory> PredictMeans(std::span<const PlannerExample> examples,
                                     const PlannerParams& params, const PlannerConfig& config);
std::vector<Trajectory> GroundTruth(std::span<const PlannerExample> examples, int horizon);

TrajectoryError EvaluatePlanner(std::span<const PlannerExample> examples,
                                const PlannerParams& params, const PlannerConfig& config);

}  // namespace bevplan
