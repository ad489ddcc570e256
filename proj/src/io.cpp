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

#include "bevplan/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "bevplan/error.hpp"

namespace bevplan::io {

namespace fs = std::filesystem;

namespace {

std::ofstream OpenOut(const fs::path& path, bool binary) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) Fail(ErrorKind::kData, "cannot write " + path.string());
  return out;
}

void WriteBytes(const fs::path& path, int rows, int cols, const std::vector<unsigned char>& bytes) {
  std::ofstream out = OpenOut(path, true);
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kData, "short write to " + path.string());
}

fs::path SidecarPath(const fs::path& pgm) {
  fs::path p = pgm;
  return p.replace_extension(".json");
}

fs::path ValidPath(const fs::path& pgm) {
  return pgm.parent_path() / (pgm.stem().string() + "_valid.pgm");
}

const char* ChannelName(Channel c) { return c == Channel::kDrivable ? "drivable" : "vehicle"; }

}  // namespace

void WritePgm(const fs::path& path, const RealGrid& grid) {
  std::vector<unsigned char> bytes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = std::clamp(grid.values()[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
  WriteBytes(path, grid.rows(), grid.cols(), bytes);
}

void WritePgm(const fs::path& path, const MaskGrid& mask) {
  std::vector<unsigned char> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask.values()[i] ? 255 : 0;
  WriteBytes(path, mask.rows(), mask.cols(), bytes);
}

RealGrid ReadPgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kData, "cannot read " + path.string());
  std::string magic;
  int cols = 0, rows = 0, maxval = 0;
  in >> magic >> cols >> rows >> maxval;
  if (magic != "P5" || cols <= 0 || rows <= 0 || maxval != 255) {
    Fail(ErrorKind::kData, path.string() + ": expected an 8-bit binary PGM");
  }
  in.get();
  std::vector<unsigned char> bytes(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    Fail(ErrorKind::kData, path.string() + ": truncated pixel data");
  }
  RealGrid grid(rows, cols);
  for (std::size_t i = 0; i < bytes.size(); ++i) grid.values()[i] = bytes[i] / 255.0;
  return grid;
}

void WriteOccupancyGrid(const fs::path& path, const OccupancyGrid& grid) {
  WritePgm(path, grid.cells);
  Json side;
  side["rows"] = grid.cells.rows();
  side["cols"] = grid.cells.cols();
  side["resolution"] = grid.spec.resolution;
  side["origin"] = {{"anchor_row", grid.spec.anchor_row}, {"anchor_col", grid.spec.anchor_col}};
  side["channel"] = ChannelName(grid.channel);
  if (grid.valid) {
    WritePgm(ValidPath(path), *grid.valid);
    side["valid"] = ValidPath(path).filename().string();
  } else {
    side["valid"] = nullptr;
  }
  WriteJson(SidecarPath(path), side);
}

OccupancyGrid ReadOccupancyGrid(const fs::path& path) {
  OccupancyGrid grid;
  grid.cells = ReadPgm(path);
  const fs::path side_path = SidecarPath(path);
  if (fs::exists(side_path)) {
    const Json side = ReadJson(side_path);
    grid.spec.rows = side.at("rows").get<int>();
    grid.spec.cols = side.at("cols").get<int>();
    grid.spec.resolution = side.at("resolution").get<double>();
    grid.spec.anchor_row = side.at("origin").at("anchor_row").get<int>();
    grid.spec.anchor_col = side.at("origin").at("anchor_col").get<int>();
    grid.channel = side.value("channel", "drivable") == "vehicle" ? Channel::kVehicle : Channel::kDrivable;
    if (side.contains("valid") && side["valid"].is_string()) {
      const RealGrid v = ReadPgm(path.parent_path() / side["valid"].get<std::string>());
      MaskGrid mask(v.rows(), v.cols(), 0);
      for (std::size_t i = 0; i < v.size(); ++i) mask.values()[i] = v.values()[i] >= 0.5 ? 1 : 0;
      grid.valid = std::move(mask);
    }
  } else {
    grid.spec.rows = grid.cells.rows();
    grid.spec.cols = grid.cells.cols();
  }
  if (grid.spec.rows != grid.cells.rows() || grid.spec.cols != grid.cells.cols()) {
    Fail(ErrorKind::kData, path.string() + ": sidecar size disagrees with the image");
  }
  grid.spec.validate();
  return grid;
}

Json ToJson(const Homography& h) {
  Json arr = Json::array();
  for (double v : h.RowMajor()) arr.push_back(v);
  return arr;
}

Homography HomographyFromJson(const Json& j) {
  if (j.is_object() && !j.contains("homography")) Fail(ErrorKind::kData, "missing key 'homography'");
  const Json& arr = j.is_object() ? j.at("homography") : j;
  if (!arr.is_array() || arr.size() != 9) Fail(ErrorKind::kData, "homography must have 9 numbers");
  std::array<double, 9> v{};
  for (std::size_t i = 0; i < 9; ++i) {
    if (!arr[i].is_number()) Fail(ErrorKind::kData, "homography entries must be numbers");
    v[i] = arr[i].get<double>();
  }
  return Homography::FromRowMajor(v);
}

Json ToJson(const GridSpec& spec) {
  return {{"rows", spec.rows},
          {"cols", spec.cols},
          {"resolution", spec.resolution},
          {"anchor_row", spec.anchor_row},
          {"anchor_col", spec.anchor_col}};
}

GridSpec GridSpecFromJson(const Json& j) {
  GridSpec spec;
  spec.rows = j.value("rows", spec.rows);
  spec.cols = j.value("cols", spec.cols);
  spec.resolution = j.value("resolution", spec.resolution);
  spec.anchor_row = j.value("anchor_row", spec.anchor_row);
  spec.anchor_col = j.value("anchor_col", spec.anchor_col);
  return spec;
}

namespace {

Json CameraToJson(const CameraConfig& c) {
  return {{"height_m", c.height_m},
          {"pitch_deg", c.pitch_deg},
          {"horizontal_fov_deg", c.horizontal_fov_deg},
          {"image_width", c.image_width},
          {"image_height", c.image_height},
          {"mask_scale", c.mask_scale}};
}

CameraConfig CameraFromJson(const Json& j) {
  CameraConfig c;
  c.height_m = j.value("height_m", c.height_m);
  c.pitch_deg = j.value("pitch_deg", c.pitch_deg);
  c.horizontal_fov_deg = j.value("horizontal_fov_deg", c.horizontal_fov_deg);
  c.image_width = j.value("image_width", c.image_width);
  c.image_height = j.value("image_height", c.image_height);
  c.mask_scale = j.value("mask_scale", c.mask_scale);
  return c;
}

Json PolygonToJson(const Polygon& poly) {
  Json arr = Json::array();
  for (const Vec2& p : poly) arr.push_back({p.x(), p.y()});
  return arr;
}

Json VecToJson(const Vec2& p) { return {p.x(), p.y()}; }
Vec2 VecFromJson(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

Json ToJson(const SceneConfig& c) {
  Json j;
  j["duration_s"] = c.duration_s;
  j["road_width_min"] = c.road_width_min;
  j["road_width_max"] = c.road_width_max;
  j["min_vehicles"] = c.min_vehicles;
  j["max_vehicles"] = c.max_vehicles;
  j["scenario_weights"] = c.scenario_weights;
  j["scenario"] = c.scenario ? Json(ScenarioName(*c.scenario)) : Json(nullptr);
  j["speed_min"] = c.speed_min;
  j["speed_max"] = c.speed_max;
  j["accel_max"] = c.accel_max;
  j["slight_radius_min"] = c.slight_radius_min;
  j["slight_radius_max"] = c.slight_radius_max;
  j["slight_angle_deg_min"] = c.slight_angle_deg_min;
  j["slight_angle_deg_max"] = c.slight_angle_deg_max;
  j["sharp_radius_min"] = c.sharp_radius_min;
  j["sharp_radius_max"] = c.sharp_radius_max;
  j["sharp_angle_deg_min"] = c.sharp_angle_deg_min;
  j["sharp_angle_deg_max"] = c.sharp_angle_deg_max;
  j["camera"] = CameraToJson(c.camera);
  j["grid"] = ToJson(c.grid);
  return j;
}

SceneConfig SceneConfigFromJson(const Json& j) {
  SceneConfig c;
  if (!j.is_object()) Fail(ErrorKind::kData, "scene config must be a JSON object");
  c.duration_s = j.value("duration_s", c.duration_s);
  c.road_width_min = j.value("road_width_min", c.road_width_min);
  c.road_width_max = j.value("road_width_max", c.road_width_max);
  c.min_vehicles = j.value("min_vehicles", c.min_vehicles);
  c.max_vehicles = j.value("max_vehicles", c.max_vehicles);
  if (j.contains("scenario_weights")) c.scenario_weights = j["scenario_weights"].get<std::array<double, 3>>();
  if (j.contains("scenario") && j["scenario"].is_string()) c.scenario = ParseScenario(j["scenario"].get<std::string>());
  c.speed_min = j.value("speed_min", c.speed_min);
  c.speed_max = j.value("speed_max", c.speed_max);
  c.accel_max = j.value("accel_max", c.accel_max);
  c.slight_radius_min = j.value("slight_radius_min", c.slight_radius_min);
  c.slight_radius_max = j.value("slight_radius_max", c.slight_radius_max);
  c.slight_angle_deg_min = j.value("slight_angle_deg_min", c.slight_angle_deg_min);
  c.slight_angle_deg_max = j.value("slight_angle_deg_max", c.slight_angle_deg_max);
  c.sharp_radius_min = j.value("sharp_radius_min", c.sharp_radius_min);
  c.sharp_radius_max = j.value("sharp_radius_max", c.sharp_radius_max);
  c.sharp_angle_deg_min = j.value("sharp_angle_deg_min", c.sharp_angle_deg_min);
  c.sharp_angle_deg_max = j.value("sharp_angle_deg_max", c.sharp_angle_deg_max);
  if (j.contains("camera")) c.camera = CameraFromJson(j["camera"]);
  if (j.contains("grid")) c.grid = GridSpecFromJson(j["grid"]);
  return c;
}

Json ToJson(const Scene& scene) {
  Json j;
  j["seed"] = scene.seed;
  j["type"] = ScenarioName(scene.type);
  Json segs = Json::array();
  for (const RoadSegment& s : scene.road.segments()) {
    segs.push_back({{"length", s.length}, {"curvature", s.curvature}});
  }
  j["road"] = {{"start_s", scene.road.start_s()}, {"width", scene.road.width()}, {"segments", segs}};
  Json polys = Json::array();
  for (const Polygon& p : scene.road_polygons) polys.push_back(PolygonToJson(p));
  j["road_polygons"] = polys;
  Json vehicles = Json::array();
  for (const VehicleTrack& v : scene.vehicles) {
    vehicles.push_back({{"s0", v.s0},
                        {"speed", v.speed},
                        {"lane_offset", v.lane_offset},
                        {"length", v.length},
                        {"width", v.width},
                        {"height", v.height}});
  }
  j["vehicles"] = vehicles;
  Json ego = Json::array();
  for (const EgoState& e : scene.ego) {
    ego.push_back({{"t", e.t}, {"x", e.pose.x}, {"y", e.pose.y}, {"yaw", e.pose.yaw},
                   {"speed", e.speed}, {"s", e.s}});
  }
  j["ego"] = ego;
  j["camera"] = CameraToJson(scene.camera);
  j["grid"] = ToJson(scene.grid);
  return j;
}

Scene SceneFromJson(const Json& j) {
  try {
    Scene scene;
    scene.seed = j.at("seed").get<std::uint64_t>();
    scene.type = ParseScenario(j.at("type").get<std::string>());
    std::vector<RoadSegment> segs;
    for (const Json& s : j.at("road").at("segments")) {
      segs.push_back({s.at("length").get<double>(), s.at("curvature").get<double>()});
    }
    scene.road = Road(j.at("road").at("start_s").get<double>(), j.at("road").at("width").get<double>(),
                      std::move(segs));
    for (const Json& p : j.at("road_polygons")) {
      Polygon poly;
      for (const Json& v : p) poly.push_back(VecFromJson(v));
      scene.road_polygons.push_back(std::move(poly));
    }
    for (const Json& v : j.at("vehicles")) {
      VehicleTrack t;
      t.s0 = v.at("s0").get<double>();
      t.speed = v.at("speed").get<double>();
      t.lane_offset = v.at("lane_offset").get<double>();
      t.length = v.at("length").get<double>();
      t.width = v.at("width").get<double>();
      t.height = v.at("height").get<double>();
      scene.vehicles.push_back(t);
    }
    for (const Json& e : j.at("ego")) {
      EgoState s;
      s.t = e.at("t").get<double>();
      s.pose = {e.at("x").get<double>(), e.at("y").get<double>(), e.at("yaw").get<double>()};
      s.speed = e.at("speed").get<double>();
      s.s = e.at("s").get<double>();
      scene.ego.push_back(s);
    }
    scene.camera = CameraFromJson(j.at("camera"));
    scene.grid = GridSpecFromJson(j.at("grid"));
    return scene;
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, std::string("malformed scene JSON: ") + e.what());
  }
}

Json ToJson(const TrajectorySample& s) {
  Json past = Json::array();
  for (const Vec2& p : s.past) past.push_back(VecToJson(p));
  Json future = Json::array();
  for (const Vec2& p : s.future) future.push_back(VecToJson(p));
  return {{"scene", s.scene},
          {"frame", s.frame},
          {"past", past},
          {"future", future},
          {"destination", VecToJson(s.destination)},
          {"destination_polar", {{"r", s.dest_r}, {"alpha", s.dest_alpha}}}};
}

TrajectorySample TrajectorySampleFromJson(const Json& j) {
  try {
    TrajectorySample s;
    s.scene = j.at("scene").get<int>();
    s.frame = j.at("frame").get<int>();
    const Json& past = j.at("past");
    const Json& future = j.at("future");
    if (past.size() != kPastSteps || future.size() != kFutureSteps) {
      Fail(ErrorKind::kData, "sample needs 6 past and 5 future positions");
    }
    for (std::size_t i = 0; i < kPastSteps; ++i) s.past[i] = VecFromJson(past[i]);
    for (std::size_t i = 0; i < kFutureSteps; ++i) s.future[i] = VecFromJson(future[i]);
    s.destination = VecFromJson(j.at("destination"));
    s.dest_r = j.at("destination_polar").at("r").get<double>();
    s.dest_alpha = j.at("destination_polar").at("alpha").get<double>();
    return s;
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, std::string("malformed sample JSON: ") + e.what());
  }
}

Json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kData, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kData, path.string() + ": " + e.what());
  }
}

void WriteJson(const fs::path& path, const Json& j) { WriteText(path, j.dump(2) + "\n"); }

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out = OpenOut(path, false);
  out << text;
  if (!out) Fail(ErrorKind::kData, "short write to " + path.string());
}

}  // namespace bevplan::io
