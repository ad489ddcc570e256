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
#include <filesystem>
#include <string>
#include <vector>

#include "bevplan/scene.hpp"

namespace bevplan {

inline constexpr const char* kDatasetFormat = "bevplan-dataset-1";

/// Seed of scene `index` in a dataset built from `seed`.
std::uint64_t SceneSeed(std::uint64_t seed, int index);

std::string SceneDirName(int index);                  // "scene_0007"
std::string FrameStem(int frame);                     // "frame_012"
std::string SampleFileName(int frame);                // "sample_012.json"

/// A dataset on disk, as described by its manifest.json.
struct DatasetIndex {
  std::filesystem::path root;
  DatasetManifest manifest;
  SceneConfig config;
  std::vector<std::uint64_t> scene_seeds;
};

DatasetIndex LoadDatasetIndex(const std::filesystem::path& root);

/// Everything stored for one scene: the scene itself, per-frame camera
/// masks with homographies, and its trajectory samples.
struct SceneData {
  int index = 0;
  Scene scene;
  std::vector<CameraFrame> frames;
  std::vector<TrajectorySample> samples;
};

SceneData LoadSceneData(const DatasetIndex& index, int scene_index);

/// Same content as LoadSceneData, generated in memory.
SceneData GenerateSceneData(std::uint64_t dataset_seed, int scene_index, const SceneConfig& config);

}  // namespace bevplan
