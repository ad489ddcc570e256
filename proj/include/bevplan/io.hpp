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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "bevplan/geometry.hpp"
#include "bevplan/grid.hpp"
#include "bevplan/ogm.hpp"
#include "bevplan/scene.hpp"
#include "bevplan/trajectory.hpp"

namespace bevplan::io {

using Json = nlohmann::json;

/// Binary P5, one byte per cell; values in [0, 1] are stored as round(255 v).
void WritePgm(const std::filesystem::path& path, const RealGrid& grid);
RealGrid ReadPgm(const std::filesystem::path& path);
void WritePgm(const std::filesystem::path& path, const MaskGrid& mask);  // 1 -> 255

/// Writes `<stem>.pgm`, `<stem>.json` and, when the grid carries one,
/// `<stem>_valid.pgm`. `path` is the .pgm path.
void WriteOccupancyGrid(const std::filesystem::path& path, const OccupancyGrid& grid);
OccupancyGrid ReadOccupancyGrid(const std::filesystem::path& path);

Json ToJson(const Homography& h);
Homography HomographyFromJson(const Json& j);

Json ToJson(const GridSpec& spec);
GridSpec GridSpecFromJson(const Json& j);

Json ToJson(const SceneConfig& config);
/// Missing keys keep their defaults.
SceneConfig SceneConfigFromJson(const Json& j);

Json ToJson(const Scene& scene);
Scene SceneFromJson(const Json& j);

Json ToJson(const TrajectorySample& sample);
TrajectorySample TrajectorySampleFromJson(const Json& j);

Json ReadJson(const std::filesystem::path& path);
/// Two-space indented, trailing newline.
void WriteJson(const std::filesystem::path& path, const Json& j);
void WriteText(const std::filesystem::path& path, const std::string& text);

}  // namespace bevplan::io
