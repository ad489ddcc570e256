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

#include <gtest/gtest.h>

#include "bevplan/error.hpp"
#include "bevplan/experiment.hpp"

namespace bevplan {
namespace {

SceneData SmallScene() {
  SceneConfig cfg;
  cfg.duration_s = 7.0;
  cfg.min_vehicles = 2;
  return GenerateSceneData(3, 0, cfg);
}

TEST(Presets, KnownAndUnknown) {
  EXPECT_EQ(ExperimentPresets().size(), 9u);
  EXPECT_EQ(FindPreset("holistic").source, FeatureSource::kCameraWarped);
  EXPECT_FALSE(FindPreset("holistic-np").use_past);
  EXPECT_EQ(FindPreset("lstm-ed").source, FeatureSource::kNone);
  EXPECT_EQ(FindPreset("mid-to-end-corrupted").source, FeatureSource::kBevCorrupted);
  EXPECT_EQ(FindPreset("holistic-cv").source, FeatureSource::kCameraView);
  try {
    FindPreset("holistic-xl");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(Presets, PlannerWiring) {
  const ExperimentConfig cfg;
  const SceneConfig sc;
  const PlannerConfig lstm = PresetPlannerConfig(FindPreset("lstm-ed"), cfg, sc.grid, sc.camera);
  EXPECT_FALSE(lstm.use_grids);
  EXPECT_TRUE(lstm.use_past);
  const PlannerConfig hol = PresetPlannerConfig(FindPreset("holistic"), cfg, sc.grid, sc.camera);
  EXPECT_TRUE(hol.use_grids);
  EXPECT_EQ(hol.feature_dim, 650);
  const PlannerConfig cv = PresetPlannerConfig(FindPreset("holistic-cv"), cfg, sc.grid, sc.camera);
  EXPECT_EQ(cv.feature_dim, 2 * (360 / 25) * (640 / 25));
  EXPECT_FALSE(PresetPlannerConfig(FindPreset("mid-to-end-np"), cfg, sc.grid, sc.camera).use_past);
}

TEST(Presets, LstmEdIgnoresGrids) {
  const SceneData data = SmallScene();
  const ExperimentConfig cfg;
  const auto ex = PresetExamples(data, FindPreset("lstm-ed"), cfg, 1);
  ASSERT_FALSE(ex.empty());
  for (const PlannerExample& e : ex) EXPECT_TRUE(e.features.empty());

  // Any grid content gives identical predictions when grids are unused.
  const PlannerConfig pc = PresetPlannerConfig(FindPreset("lstm-ed"), cfg, data.scene.grid, data.scene.camera);
  Rng rng(2);
  const PlannerParams p = PlannerParams::Random(pc, rng);
  PlannerExample with_grids = ex[0];
  for (int t = 0; t < kPastSteps; ++t) with_grids.features.push_back(Eigen::VectorXd::Random(650));
  const auto a = Predict(ex[0], p, pc);
  const auto b = Predict(with_grids, p, pc);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(a[t].mu_x, b[t].mu_x);
}

TEST(Presets, FeatureShapesAndDeterminism) {
  const SceneData data = SmallScene();
  const ExperimentConfig cfg;
  for (const char* name : {"holistic", "mid-to-end", "mid-to-end-corrupted", "holistic-cv"}) {
    const ExperimentPreset preset = FindPreset(name);
    const PlannerConfig pc = PresetPlannerConfig(preset, cfg, data.scene.grid, data.scene.camera);
    const auto a = PresetExamples(data, preset, cfg, 4);
    const auto b = PresetExamples(data, preset, cfg, 4);
    ASSERT_EQ(a.size(), data.samples.size()) << name;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].features.size(), static_cast<std::size_t>(kPastSteps));
      for (int t = 0; t < kPastSteps; ++t) {
        EXPECT_EQ(a[i].features[t].size(), pc.feature_dim) << name;
        EXPECT_EQ(a[i].features[t], b[i].features[t]) << name;
        EXPECT_GE(a[i].features[t].minCoeff(), 0.0);
        EXPECT_LE(a[i].features[t].maxCoeff(), 1.0);
      }
    }
  }
}

TEST(Presets, CleanBevMatchesGroundTruth) {
  const SceneData data = SmallScene();
  const GridFrame f = PresetFrame(data, 5, FindPreset("mid-to-end"), ExperimentConfig{}, 1);
  EXPECT_EQ(f.drivable, BevDrivable(data.scene, 5).cells);
  EXPECT_EQ(f.vehicles, BevVehicles(data.scene, 5).cells);
  const GridFrame g = PresetFrame(data, 5, FindPreset("mid-to-end-corrupted"), ExperimentConfig{}, 1);
  EXPECT_NE(g.drivable, f.drivable);
}

TEST(Evaluate, GroundTruthAndMeans) {
  const SceneData data = SmallScene();
  const ExperimentConfig cfg;
  const ExperimentPreset preset = FindPreset("lstm-ed");
  const PlannerConfig pc = PresetPlannerConfig(preset, cfg, data.scene.grid, data.scene.camera);
  const auto ex = PresetExamples(data, preset, cfg, 1);
  const auto gt = GroundTruth(ex, 5);
  ASSERT_EQ(gt.size(), ex.size());
  EXPECT_EQ(gt[0][4], ex[0].trajectory.future[4]);
  const TrajectoryError e = EvaluatePlanner(ex, PlannerParams::Zeros(pc), pc);
  // zero weights predict the origin, so ADE is the mean distance travelled
  EXPECT_NEAR(e.horizons[0].ade, Ade(PredictMeans(ex, PlannerParams::Zeros(pc), pc), gt, 1), 1e-12);
  EXPECT_GT(e.horizons[2].fde, 0.0);
}

}  // namespace
}  // namespace bevplan
