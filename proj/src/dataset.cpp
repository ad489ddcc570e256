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

#include "bevplan/dataset.hpp"

#include <cstdio>

#include "bevplan/error.hpp"
#include "bevplan/io.hpp"
#include "bevplan/random.hpp"

namespace bevplan {

namespace fs = std::filesystem;
using io::Json;

namespace {

std::string Numbered(const char* fmt, int value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

Json SplitJson(const std::vector<int>& scenes, const std::vector<int>& per_scene) {
  int samples = 0;
  for (int s : scenes) samples += per_scene[static_cast<std::size_t>(s)];
  return {{"scenes", scenes}, {"samples", samples}};
}

void WriteSceneData(const fs::path& dir, const SceneData& data) {
  fs::create_directories(dir / "samples");
  io::WriteJson(dir / "scene.json", io::ToJson(data.scene));
  for (std::size_t f = 0; f < data.frames.size(); ++f) {
    const std::string stem = FrameStem(static_cast<int>(f));
    io::WritePgm(dir / (stem + "_drivable.pgm"), data.frames[f].drivable);
    io::WritePgm(dir / (stem + "_vehicles.pgm"), data.frames[f].vehicles);
    io::WriteJson(dir / (stem + ".json"),
                  {{"frame", f},
                   {"drivable", stem + "_drivable.pgm"},
                   {"vehicles", stem + "_vehicles.pgm"},
                   {"homography", io::ToJson(data.frames[f].homography)}});
  }
  for (const TrajectorySample& s : data.samples) {
    Json j = io::ToJson(s);
    Json inputs = Json::array();
    for (int k = s.frame - kPastSteps + 1; k <= s.frame; ++k) inputs.push_back(FrameStem(k));
    j["input_frames"] = inputs;
    io::WriteJson(dir / "samples" / SampleFileName(s.frame), j);
  }
}

}  // namespace

std::uint64_t SceneSeed(std::uint64_t seed, int index) {
  return SplitMix64(SplitMix64(seed) ^ static_cast<std::uint64_t>(index));
}

std::string SceneDirName(int index) { return Numbered("scene_%04d", index); }
std::string FrameStem(int frame) { return Numbered("frame_%03d", frame); }
std::string SampleFileName(int frame) { return Numbered("sample_%03d.json", frame); }

SceneData GenerateSceneData(std::uint64_t dataset_seed, int scene_index, const SceneConfig& config) {
  SceneData data;
  data.index = scene_index;
  data.scene = GenerateScene(SceneSeed(dataset_seed, scene_index), config);
  for (int f = 0; f < data.scene.frame_count(); ++f) data.frames.push_back(RenderMasks(data.scene, f));
  for (int f : SampleFrames(data.scene)) {
    data.samples.push_back(MakeTrajectorySample(data.scene, f, scene_index));
  }
  return data;
}

DatasetManifest BuildDataset(int n_scenes, double split_ratio, std::uint64_t seed,
                             const fs::path& out_dir, const SceneConfig& config) {
  config.Validate();
  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.n_scenes = n_scenes;
  manifest.split_ratio = split_ratio;
  manifest.split = SplitScenes(n_scenes, split_ratio, seed);
  if (fs::exists(out_dir / "manifest.json")) {
    Fail(ErrorKind::kData, "refusing to overwrite the dataset in " + out_dir.string());
  }

  Json scenes = Json::array();
  for (int i = 0; i < n_scenes; ++i) {
    const SceneData data = GenerateSceneData(seed, i, config);
    WriteSceneData(out_dir / "scenes" / SceneDirName(i), data);
    manifest.samples_per_scene.push_back(static_cast<int>(data.samples.size()));
    scenes.push_back({{"index", i},
                      {"seed", data.scene.seed},
                      {"dir", "scenes/" + SceneDirName(i)},
                      {"type", ScenarioName(data.scene.type)},
                      {"frames", data.scene.frame_count()},
                      {"samples", data.samples.size()}});
  }
  for (int s : manifest.split.train) manifest.train_samples += manifest.samples_per_scene[static_cast<std::size_t>(s)];
  for (int s : manifest.split.test) manifest.test_samples += manifest.samples_per_scene[static_cast<std::size_t>(s)];

  Json j;
  j["format"] = kDatasetFormat;
  j["seed"] = seed;
  j["n_scenes"] = n_scenes;
  j["split_ratio"] = split_ratio;
  j["config"] = io::ToJson(config);
  j["scenes"] = scenes;
  j["train"] = SplitJson(manifest.split.train, manifest.samples_per_scene);
  j["test"] = SplitJson(manifest.split.test, manifest.samples_per_scene);
  // Written last: a directory without a manifest is an unfinished build.
  io::WriteJson(out_dir / "manifest.json", j);
  return manifest;
}

DatasetIndex LoadDatasetIndex(const fs::path& root) {
  const Json j = io::ReadJson(root / "manifest.json");
  try {
    if (j.at("format").get<std::string>() != kDatasetFormat) {
      Fail(ErrorKind::kData, "unknown dataset format in " + root.string());
    }
    DatasetIndex index;
    index.root = root;
    index.config = io::SceneConfigFromJson(j.at("config"));
    DatasetManifest& m = index.manifest;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_scenes = j.at("n_scenes").get<int>();
    m.split_ratio = j.at("split_ratio").get<double>();
    m.split.train = j.at("train").at("scenes").get<std::vector<int>>();
    m.split.test = j.at("test").at("scenes").get<std::vector<int>>();
    m.train_samples = j.at("train").at("samples").get<int>();
    m.test_samples = j.at("test").at("samples").get<int>();
    for (const Json& s : j.at("scenes")) {
      m.samples_per_scene.push_back(s.at("samples").get<int>());
      index.scene_seeds.push_back(s.at("seed").get<std::uint64_t>());
    }
    if (static_cast<int>(index.scene_seeds.size()) != m.n_scenes) {
      Fail(ErrorKind::kData, "manifest scene list does not match n_scenes");
    }
    return index;
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, "malformed manifest in " + root.string() + ": " + e.what());
  }
}

SceneData LoadSceneData(const DatasetIndex& index, int scene_index) {
  if (scene_index < 0 || scene_index >= index.manifest.n_scenes) {
    Fail(ErrorKind::kInvalidArgument, "scene index outside the dataset");
  }
  const fs::path dir = index.root / "scenes" / SceneDirName(scene_index);
  SceneData data;
  data.index = scene_index;
  data.scene = io::SceneFromJson(io::ReadJson(dir / "scene.json"));
  for (int f = 0; f < data.scene.frame_count(); ++f) {
    const Json fj = io::ReadJson(dir / (FrameStem(f) + ".json"));
    CameraFrame frame;
    frame.drivable = io::ReadPgm(dir / fj.at("drivable").get<std::string>());
    frame.vehicles = io::ReadPgm(dir / fj.at("vehicles").get<std::string>());
    frame.homography = io::HomographyFromJson(fj.at("homography"));
    data.frames.push_back(std::move(frame));
  }
  for (int f : SampleFrames(data.scene)) {
    data.samples.push_back(io::TrajectorySampleFromJson(io::ReadJson(dir / "samples" / SampleFileName(f))));
  }
  return data;
}

}  // namespace bevplan
