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
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "bevplan/experiment.hpp"
#include "bevplan/planner.hpp"

namespace bevplan::io {

using Json = nlohmann::json;

Json ToJson(const PlannerConfig& config);
PlannerConfig PlannerConfigFromJson(const Json& j);

/// {"name": {"rows": r, "cols": c, "data": [column-major values]}, ...}
Json ToJson(const PlannerParams& params);
PlannerParams PlannerParamsFromJson(const Json& j, const PlannerConfig& config);

struct Model {
  std::string preset;
  PlannerConfig config;
  PlannerParams params;
};

void SaveModel(const std::filesystem::path& path, const Model& model);
Model LoadModel(const std::filesystem::path& path);

Json ToJson(const MaskNoise& noise);
/// Keys missing from `j` keep the value in `base`.
MaskNoise MaskNoiseFromJson(const Json& j, const MaskNoise& base = {});
Json ToJson(const TrainHyper& hyper);
TrainHyper TrainHyperFromJson(const Json& j, const TrainHyper& base = {});

/// Keys "noise" {"camera", "bev"}, "cv_downsample", "planner", "train";
/// missing keys keep their defaults.
Json ToJson(const ExperimentConfig& config);
ExperimentConfig ExperimentConfigFromJson(const Json& j);

/// "epoch,mean_nll" rows, epochs counted from 1.
std::string LossCurveCsv(std::span<const double> epoch_loss);

}  // namespace bevplan::io
