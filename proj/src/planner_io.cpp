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

#include "bevplan/planner_io.hpp"

#include <sstream>

#include "bevplan/error.hpp"
#include "bevplan/io.hpp"

namespace bevplan::io {

Json ToJson(const PlannerConfig& c) {
  return {{"feature_dim", c.feature_dim},       {"downsample", c.downsample},
          {"feature_embed", c.feature_embed},   {"position_embed", c.position_embed},
          {"decoder_embed", c.decoder_embed},   {"hidden", c.hidden},
          {"horizon", c.horizon},               {"input_length", c.input_length},
          {"use_grids", c.use_grids},           {"use_past", c.use_past},
          {"position_scale", c.position_scale}};
}

PlannerConfig PlannerConfigFromJson(const Json& j) {
  PlannerConfig c;
  try {
    c.feature_dim = j.value("feature_dim", c.feature_dim);
    c.downsample = j.value("downsample", c.downsample);
    c.feature_embed = j.value("feature_embed", c.feature_embed);
    c.position_embed = j.value("position_embed", c.position_embed);
    c.decoder_embed = j.value("decoder_embed", c.decoder_embed);
    c.hidden = j.value("hidden", c.hidden);
    c.horizon = j.value("horizon", c.horizon);
    c.input_length = j.value("input_length", c.input_length);
    c.use_grids = j.value("use_grids", c.use_grids);
    c.use_past = j.value("use_past", c.use_past);
    c.position_scale = j.value("position_scale", c.position_scale);
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, std::string("malformed planner config: ") + e.what());
  }
  c.Validate();
  return c;
}

Json ToJson(const PlannerParams& params) {
  Json j = Json::object();
  const auto tensors = params.Tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Eigen::MatrixXd& m = *tensors[i];
    j[PlannerParams::kNames[i]] = {{"rows", m.rows()},
                                   {"cols", m.cols()},
                                   {"data", std::vector<double>(m.data(), m.data() + m.size())}};
  }
  return j;
}

PlannerParams PlannerParamsFromJson(const Json& j, const PlannerConfig& config) {
  PlannerParams p = PlannerParams::Zeros(config);
  auto tensors = p.Tensors();
  try {
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      Eigen::MatrixXd& m = *tensors[i];
      const Json& t = j.at(PlannerParams::kNames[i]);
      const auto data = t.at("data").get<std::vector<double>>();
      if (t.at("rows").get<Eigen::Index>() != m.rows() ||
          t.at("cols").get<Eigen::Index>() != m.cols() ||
          data.size() != static_cast<std::size_t>(m.size())) {
        Fail(ErrorKind::kData, std::string("tensor ") + PlannerParams::kNames[i] +
                                   " does not match the planner config");
      }
      m = Eigen::Map<const Eigen::MatrixXd>(data.data(), m.rows(), m.cols());
    }
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, std::string("malformed planner params: ") + e.what());
  }
  if (!p.AllFinite()) Fail(ErrorKind::kData, "planner params contain non-finite values");
  return p;
}

void SaveModel(const std::filesystem::path& path, const Model& model) {
  WriteJson(path, {{"format", "bevplan-model-1"},
                   {"preset", model.preset},
                   {"config", ToJson(model.config)},
                   {"params", ToJson(model.params)}});
}

Model LoadModel(const std::filesystem::path& path) {
  const Json j = ReadJson(path);
  if (j.value("format", std::string()) != "bevplan-model-1") {
    Fail(ErrorKind::kData, "not a planner model file: " + path.string());
  }
  Model m;
  m.preset = j.value("preset", std::string());
  m.config = PlannerConfigFromJson(j.at("config"));
  m.params = PlannerParamsFromJson(j.at("params"), m.config);
  return m;
}

Json ToJson(const MaskNoise& n) {
  return {{"dropout", n.dropout},
          {"jitter_sigma", n.jitter_sigma},
          {"blur_radius", n.blur_radius},
          {"jitter_spacing", n.jitter_spacing}};
}

MaskNoise MaskNoiseFromJson(const Json& j, const MaskNoise& base) {
  MaskNoise n = base;
  n.dropout = j.value("dropout", n.dropout);
  n.jitter_sigma = j.value("jitter_sigma", n.jitter_sigma);
  n.blur_radius = j.value("blur_radius", n.blur_radius);
  n.jitter_spacing = j.value("jitter_spacing", n.jitter_spacing);
  return n;
}

Json ToJson(const TrainHyper& h) {
  return {{"learning_rate", h.learning_rate},
          {"momentum", h.momentum},
          {"batch_size", h.batch_size},
          {"epochs", h.epochs},
          {"clip_norm", h.clip_norm}};
}

TrainHyper TrainHyperFromJson(const Json& j, const TrainHyper& base) {
  TrainHyper h = base;
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.momentum = j.value("momentum", h.momentum);
  h.batch_size = j.value("batch_size", h.batch_size);
  h.epochs = j.value("epochs", h.epochs);
  h.clip_norm = j.value("clip_norm", h.clip_norm);
  return h;
}

Json ToJson(const ExperimentConfig& c) {
  return {{"noise", {{"camera", ToJson(c.camera_noise)}, {"bev", ToJson(c.bev_noise)}}},
          {"cv_downsample", c.cv_downsample},
          {"planner", ToJson(c.planner)},
          {"train", ToJson(c.hyper)}};
}

ExperimentConfig ExperimentConfigFromJson(const Json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("noise")) {
      const Json& n = j.at("noise");
      if (n.contains("camera")) c.camera_noise = MaskNoiseFromJson(n.at("camera"), c.camera_noise);
      if (n.contains("bev")) c.bev_noise = MaskNoiseFromJson(n.at("bev"), c.bev_noise);
    }
    c.cv_downsample = j.value("cv_downsample", c.cv_downsample);
    if (j.contains("planner")) c.planner = PlannerConfigFromJson(j.at("planner"));
    if (j.contains("train")) c.hyper = TrainHyperFromJson(j.at("train"), c.hyper);
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, std::string("malformed experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string LossCurveCsv(std::span<const double> epoch_loss) {
  std::ostringstream os;
  os.precision(10);
  os << "epoch,mean_nll\n";
  for (std::size_t e = 0; e < epoch_loss.size(); ++e) os << e + 1 << ',' << epoch_loss[e] << '\n';
  return os.str();
}

}  // namespace bevplan::io
