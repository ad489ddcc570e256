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

#include "bevplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bevplan/error.hpp"
#include "bevplan/random.hpp"

namespace bevplan {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kWheelbase = 2.7;
constexpr double kMaxSteer = 0.6;
constexpr double kMaxSteerRate = 0.8;  // rad/s
constexpr double kSimStep = 0.01;
constexpr int kSimStepsPerFrame = 50;

Pose2D Advance(const Pose2D& p, double length, double curvature) {
  if (std::abs(curvature) < 1e-12) {
    return {p.x + length * std::cos(p.yaw), p.y + length * std::sin(p.yaw), p.yaw};
  }
  const double yaw = p.yaw + curvature * length;
  return {p.x + (std::sin(yaw) - std::sin(p.yaw)) / curvature,
          p.y + (std::cos(p.yaw) - std::cos(yaw)) / curvature, yaw};
}

double WrapAngle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

ScenarioType PickScenario(const SceneConfig& config, Rng& rng) {
  if (config.scenario) return *config.scenario;
  const auto& w = config.scenario_weights;
  const double total = w[0] + w[1] + w[2];
  const double u = rng.Uniform() * total;
  if (u < w[0]) return ScenarioType::kStraight;
  if (u < w[0] + w[1]) return ScenarioType::kSlightTurn;
  return ScenarioType::kSharpTurn;
}

std::vector<RoadSegment> MakeSegments(ScenarioType type, double lead_in, double length,
                                      const SceneConfig& config, Rng& rng) {
  std::vector<RoadSegment> segments;
  if (type == ScenarioType::kStraight) {
    segments.push_back({length, 0.0});
    return segments;
  }
  const bool sharp = type == ScenarioType::kSharpTurn;
  double first = lead_in + rng.Uniform(0.0, 40.0);
  segments.push_back({first, 0.0});
  double covered = first;
  double heading = 0.0;
  double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  // Turn away from the initial heading, then back to it: the heading stays
  // within +-90 degrees so the road never folds back on itself.
  while (covered < length) {
    const double radius = sharp ? rng.Uniform(config.sharp_radius_min, config.sharp_radius_max)
                                : rng.Uniform(config.slight_radius_min, config.slight_radius_max);
    double turn;
    if (heading == 0.0) {
      const double angle = sharp ? rng.Uniform(config.sharp_angle_deg_min, config.sharp_angle_deg_max)
                                 : rng.Uniform(config.slight_angle_deg_min, config.slight_angle_deg_max);
      turn = sign * angle * kDeg;
      sign = -sign;
    } else {
      turn = -heading;
    }
    const double arc = std::abs(turn) * radius;
    segments.push_back({arc, std::copysign(1.0 / radius, turn)});
    heading = heading == 0.0 ? turn : 0.0;
    const double straight = rng.Uniform(15.0, 60.0);
    segments.push_back({straight, 0.0});
    covered += arc + straight;
  }
  return segments;
}

}  // namespace

const char* ScenarioName(ScenarioType type) {
  switch (type) {
    case ScenarioType::kStraight:
      return "straight";
    case ScenarioType::kSlightTurn:
      return "slight_turn";
    case ScenarioType::kSharpTurn:
      return "sharp_turn";
  }
  return "?";
}

ScenarioType ParseScenario(const std::string& name) {
  if (name == "straight") return ScenarioType::kStraight;
  if (name == "slight_turn") return ScenarioType::kSlightTurn;
  if (name == "sharp_turn") return ScenarioType::kSharpTurn;
  Fail(ErrorKind::kInvalidArgument, "unknown scenario '" + name + "'");
}

void SceneConfig::Validate() const {
  auto bad = [](const std::string& what) { Fail(ErrorKind::kInvalidArgument, "scene config: " + what); };
  if (!(duration_s >= 6.0) || !std::isfinite(duration_s)) bad("duration must be at least 6 s");
  if (std::abs(duration_s / kFrameInterval - std::round(duration_s / kFrameInterval)) > 1e-9) {
    bad("duration must be a multiple of 0.5 s");
  }
  if (!(road_width_min >= 6.0 && road_width_max <= 20.0 && road_width_min <= road_width_max)) {
    bad("road width must lie in [6, 20] m");
  }
  if (min_vehicles < 0 || max_vehicles > 12 || min_vehicles > max_vehicles) {
    bad("vehicle count must lie in [0, 12]");
  }
  for (double w : scenario_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) bad("scenario weights must be non-negative");
  }
  if (!scenario && scenario_weights[0] + scenario_weights[1] + scenario_weights[2] <= 0.0) {
    bad("scenario weights sum to zero");
  }
  if (!(speed_min > 0.0 && speed_min <= speed_max && speed_max <= 30.0)) bad("speed range");
  if (!(accel_max >= 0.0 && accel_max <= 5.0)) bad("acceleration bound");
  // Pure pursuit on the tightest arc must stay well inside the steering limit.
  const double min_radius = std::min(sharp_radius_min, slight_radius_min);
  if (!(min_radius >= 20.0) || sharp_radius_min > sharp_radius_max ||
      slight_radius_min > slight_radius_max) {
    bad("turn radii must be at least 20 m");
  }
  if (!(sharp_angle_deg_min > 0.0 && sharp_angle_deg_max <= 90.0 &&
        sharp_angle_deg_min <= sharp_angle_deg_max && slight_angle_deg_min > 0.0 &&
        slight_angle_deg_max <= 90.0 && slight_angle_deg_min <= slight_angle_deg_max)) {
    bad("turn angles must lie in (0, 90] degrees");
  }
  if (camera.mask_scale < 1 || camera.image_width % camera.mask_scale != 0 ||
      camera.image_height % camera.mask_scale != 0) {
    bad("mask scale must divide the image size");
  }
  grid.validate();
}

Road::Road(double start_s, double width, std::vector<RoadSegment> segments)
    : start_s_(start_s), width_(width), segments_(std::move(segments)) {
  if (segments_.empty() || segments_.front().curvature != 0.0 ||
      segments_.front().length < -start_s_) {
    Fail(ErrorKind::kInvalidArgument, "road must start with a straight covering s = 0");
  }
  Pose2D pose{start_s_, 0.0, 0.0};
  double s = start_s_;
  for (const RoadSegment& seg : segments_) {
    if (!(seg.length > 0.0)) Fail(ErrorKind::kInvalidArgument, "road segment length");
    segment_start_.push_back(pose);
    segment_s_.push_back(s);
    pose = Advance(pose, seg.length, seg.curvature);
    s += seg.length;
  }
}

double Road::end_s() const noexcept {
  double s = start_s_;
  for (const RoadSegment& seg : segments_) s += seg.length;
  return s;
}

Pose2D Road::CenterPose(double s) const {
  auto it = std::upper_bound(segment_s_.begin(), segment_s_.end(), s);
  const std::size_t idx = it == segment_s_.begin() ? 0 : static_cast<std::size_t>(it - segment_s_.begin() - 1);
  return Advance(segment_start_[idx], s - segment_s_[idx], segments_[idx].curvature);
}

double Road::CurvatureAt(double s) const {
  auto it = std::upper_bound(segment_s_.begin(), segment_s_.end(), s);
  const std::size_t idx = it == segment_s_.begin() ? 0 : static_cast<std::size_t>(it - segment_s_.begin() - 1);
  return segments_[idx].curvature;
}

Vec2 Road::LanePoint(double s, double offset) const {
  const Pose2D p = CenterPose(s);
  return {p.x - offset * std::sin(p.yaw), p.y + offset * std::cos(p.yaw)};
}

double Road::Project(const Vec2& p, double s_guess) const {
  double s = s_guess;
  for (int i = 0; i < 8; ++i) {
    const Pose2D c = CenterPose(s);
    const Vec2 d(p.x() - c.x, p.y() - c.y);
    const double along = d.x() * std::cos(c.yaw) + d.y() * std::sin(c.yaw);
    const double lateral = -d.x() * std::sin(c.yaw) + d.y() * std::cos(c.yaw);
    const double step = along / (1.0 - CurvatureAt(s) * lateral);
    s += step;
    if (std::abs(step) < 1e-10) break;
  }
  return s;
}

Polygon Road::ToPolygon(double s0, double s1, double step) const {
  s0 = std::max(s0, start_s_);
  s1 = std::min(s1, end_s());
  Polygon poly;
  if (!(s1 > s0)) return poly;
  const int n = static_cast<int>(std::ceil((s1 - s0) / step));
  std::vector<double> stations;
  for (int i = 0; i <= n; ++i) stations.push_back(std::min(s0 + i * step, s1));
  for (double s : stations) poly.push_back(LanePoint(s, 0.5 * width_));
  for (auto it = stations.rbegin(); it != stations.rend(); ++it) {
    poly.push_back(LanePoint(*it, -0.5 * width_));
  }
  return poly;
}

Box3D VehicleTrack::BoxAt(const Road& road, double t) const {
  const double s = s0 + speed * t;
  const Vec2 p = road.LanePoint(s, lane_offset);
  const Pose2D c = road.CenterPose(s);
  Box3D box;
  box.center = Vec3(p.x(), p.y(), 0.5 * height);
  box.length = length;
  box.width = width;
  box.height = height;
  box.yaw = speed < 0.0 ? WrapAngle(c.yaw + kPi) : c.yaw;
  return box;
}

std::vector<Box3D> Scene::VehicleBoxes(int frame) const {
  std::vector<Box3D> boxes;
  boxes.reserve(vehicles.size());
  for (const VehicleTrack& v : vehicles) boxes.push_back(v.BoxAt(road, frame * kFrameInterval));
  return boxes;
}

std::vector<Polygon> Scene::LocalRoadPolygons(int frame) const {
  const double s = ego.at(static_cast<std::size_t>(frame)).s;
  return {road.ToPolygon(s - 150.0, s + 300.0)};
}

CameraModel Scene::FullCamera() const {
  return CameraModel::Mounted(camera.height_m, camera.pitch_deg * kDeg,
                              camera.horizontal_fov_deg * kDeg, camera.image_width,
                              camera.image_height);
}

CameraModel Scene::MaskCamera() const { return FullCamera().Scaled(1.0 / camera.mask_scale); }

Scene GenerateScene(std::uint64_t seed, const SceneConfig& config) {
  config.Validate();
  Rng rng = Rng::Stream(seed, "scene");
  Scene scene;
  scene.seed = seed;
  scene.camera = config.camera;
  scene.grid = config.grid;
  scene.type = PickScenario(config, rng);
  const double width = rng.Uniform(config.road_width_min, config.road_width_max);
  const double travel = config.speed_max * (config.duration_s + 3.0);
  const double start_s = -(60.0 + travel);
  const double length = 2.0 * travel + 450.0;
  scene.road = Road(start_s, width, MakeSegments(scene.type, -start_s, length, config, rng));
  scene.road_polygons = {scene.road.ToPolygon(scene.road.start_s(), scene.road.end_s(), 1.0)};

  // Ego: kinematic bicycle (rear-axle reference) tracking the right lane
  // with pure pursuit and a bounded steering rate.
  const double lane = -0.25 * width;
  const Vec2 p0 = scene.road.LanePoint(0.0, lane);
  double x = p0.x(), y = p0.y(), yaw = 0.0, steer = 0.0, s = 0.0;
  double v = rng.Uniform(config.speed_min, config.speed_max);
  double accel = 0.0;
  double next_change = 0.0;
  const int frames = static_cast<int>(std::lround(config.duration_s / kFrameInterval)) + 1;
  const int total_steps = (frames - 1) * kSimStepsPerFrame;
  for (int step = 0; step <= total_steps; ++step) {
    const double t = step * kSimStep;
    if (step % kSimStepsPerFrame == 0) {
      EgoState state;
      state.t = (step / kSimStepsPerFrame) * kFrameInterval;
      state.pose = {x, y, WrapAngle(yaw)};
      state.speed = v;
      state.s = s;
      scene.ego.push_back(state);
    }
    if (step == total_steps) break;
    if (t >= next_change - 1e-9) {
      accel = rng.Uniform(-config.accel_max, config.accel_max);
      next_change = t + rng.Uniform(1.5, 4.0);
    }
    const double lookahead = std::max(4.0, 0.8 * v);
    const Vec2 target = scene.road.LanePoint(s + lookahead, lane);
    const double dx = target.x() - x;
    const double dy = target.y() - y;
    const double lx = std::cos(yaw) * dx + std::sin(yaw) * dy;
    const double ly = -std::sin(yaw) * dx + std::cos(yaw) * dy;
    const double dist2 = lx * lx + ly * ly;
    const double desired = std::atan(2.0 * kWheelbase * ly / dist2);
    const double max_delta = kMaxSteerRate * kSimStep;
    steer += std::clamp(desired - steer, -max_delta, max_delta);
    steer = std::clamp(steer, -kMaxSteer, kMaxSteer);
    x += v * std::cos(yaw) * kSimStep;
    y += v * std::sin(yaw) * kSimStep;
    yaw += v / kWheelbase * std::tan(steer) * kSimStep;
    v = std::clamp(v + accel * kSimStep, config.speed_min, config.speed_max);
    s = scene.road.Project(Vec2(x, y), s);
  }

  const int n_vehicles =
      config.min_vehicles + static_cast<int>(rng.Below(static_cast<std::uint64_t>(
                                config.max_vehicles - config.min_vehicles + 1)));
  for (int i = 0; i < n_vehicles; ++i) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      VehicleTrack track;
      const bool oncoming = rng.Uniform() < 0.5;
      track.lane_offset = oncoming ? -lane : lane;
      track.s0 = rng.Uniform(-15.0, 110.0);
      track.speed = rng.Uniform(config.speed_min, config.speed_max) * (oncoming ? -1.0 : 1.0);
      track.length = rng.Uniform(3.8, 5.2);
      track.width = rng.Uniform(1.7, 2.1);
      track.height = rng.Uniform(1.4, 2.0);
      bool clear = oncoming || std::abs(track.s0) > 0.5 * (track.length + kEgoLength) + 1.0;
      for (const VehicleTrack& other : scene.vehicles) {
        if (other.lane_offset == track.lane_offset &&
            std::abs(other.s0 - track.s0) < 0.5 * (other.length + track.length) + 1.0) {
          clear = false;
        }
      }
      if (clear) {
        scene.vehicles.push_back(track);
        break;
      }
    }
  }
  return scene;
}

OccupancyGrid BevDrivable(const Scene& scene, int frame) {
  const auto polys = scene.LocalRoadPolygons(frame);
  return RasterizeDrivable(polys, scene.ego.at(static_cast<std::size_t>(frame)).pose, scene.grid);
}

OccupancyGrid BevVehicles(const Scene& scene, int frame) {
  const auto boxes = scene.VehicleBoxes(frame);
  return RasterizeFootprints(boxes, scene.ego.at(static_cast<std::size_t>(frame)).pose, scene.grid);
}

Homography MaskHomography(const CameraModel& full_camera, int mask_scale, const GridSpec& spec) {
  const double s = static_cast<double>(mask_scale);
  const Homography full = GroundPlaneHomography(full_camera, spec);
  const Homography rescaled = RescaleHomography(full, 1.0 / s);
  const Eigen::Matrix3d to_grid = Eigen::Vector3d(s, s, 1.0).asDiagonal();
  return Homography::FromMatrix(to_grid * rescaled.matrix());
}

CameraFrame RenderMasks(const Scene& scene, int frame) {
  if (frame < 0 || frame >= scene.frame_count()) {
    Fail(ErrorKind::kInvalidArgument, "frame outside the scene horizon");
  }
  const CameraModel mask_cam = scene.MaskCamera();
  CameraFrame out;
  out.homography = MaskHomography(scene.FullCamera(), scene.camera.mask_scale, scene.grid);
  const OccupancyGrid bev = BevDrivable(scene, frame);
  out.drivable =
      WarpMask(bev.cells, out.homography.Inverse(), mask_cam.height(), mask_cam.width()).values;

  const Pose2D& ego = scene.ego[static_cast<std::size_t>(frame)].pose;
  std::vector<Polygon> polys;
  for (const Box3D& box : scene.VehicleBoxes(frame)) {
    try {
      Polygon poly = FootprintPolygonCamera(box.ToEgo(ego), mask_cam);
      if (!poly.empty()) polys.push_back(std::move(poly));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBehindCamera) throw;
    }
  }
  out.vehicles = RasterizePolygons(polys, mask_cam.height(), mask_cam.width());
  return out;
}

RealGrid CorruptMask(const RealGrid& mask, const MaskNoise& noise, std::uint64_t seed) {
  if (!(noise.dropout >= 0.0 && noise.dropout < 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "dropout probability must lie in [0, 1)");
  }
  if (!(noise.jitter_sigma >= 0.0) || noise.blur_radius < 0 || !(noise.jitter_spacing > 0.0)) {
    Fail(ErrorKind::kInvalidArgument, "noise parameters must be non-negative");
  }
  const int rows = mask.rows();
  const int cols = mask.cols();
  RealGrid out = mask;
  if (noise.jitter_sigma > 0.0 && !mask.empty()) {
    // Displacement lattice of standard normals, scaled by sigma so a larger
    // sigma with the same seed moves every boundary further.
    Rng rng = Rng::Stream(seed, "jitter");
    const double sp = noise.jitter_spacing;
    const int lr = static_cast<int>(std::ceil(rows / sp)) + 2;
    const int lc = static_cast<int>(std::ceil(cols / sp)) + 2;
    RealGrid ux(lr, lc), uy(lr, lc);
    for (double& v : ux.values()) v = rng.Normal();
    for (double& v : uy.values()) v = rng.Normal();
    for (int r = 0; r < rows; ++r) {
      const double gy = r / sp;
      const int y0 = static_cast<int>(gy);
      const double fy = gy - y0;
      for (int c = 0; c < cols; ++c) {
        const double gx = c / sp;
        const int x0 = static_cast<int>(gx);
        const double fx = gx - x0;
        auto lerp = [&](const RealGrid& g) {
          const double top = (1.0 - fx) * g(y0, x0) + fx * g(y0, x0 + 1);
          const double bot = (1.0 - fx) * g(y0 + 1, x0) + fx * g(y0 + 1, x0 + 1);
          return (1.0 - fy) * top + fy * bot;
        };
        const double sx = c + noise.jitter_sigma * lerp(ux);
        const double sy = r + noise.jitter_sigma * lerp(uy);
        const int nc = std::clamp(static_cast<int>(std::floor(sx + 0.5)), 0, cols - 1);
        const int nr = std::clamp(static_cast<int>(std::floor(sy + 0.5)), 0, rows - 1);
        out(r, c) = mask(nr, nc);
      }
    }
  }
  if (noise.dropout > 0.0) {
    Rng rng = Rng::Stream(seed, "dropout");
    for (double& v : out.values()) {
      const double u = rng.Uniform();
      if (u < noise.dropout) v = 0.0;
    }
  }
  if (noise.blur_radius > 0 && !mask.empty()) {
    const int k = noise.blur_radius;
    RealGrid tmp(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (int d = -k; d <= k; ++d) sum += out(r, std::clamp(c + d, 0, cols - 1));
        tmp(r, c) = sum / (2 * k + 1);
      }
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (int d = -k; d <= k; ++d) sum += tmp(std::clamp(r + d, 0, rows - 1), c);
        out(r, c) = sum / (2 * k + 1);
      }
    }
  }
  return out;
}

std::vector<int> SampleFrames(const Scene& scene) {
  std::vector<int> frames;
  for (int k = kPastSteps - 1; k + kFutureSteps + 1 < scene.frame_count(); ++k) frames.push_back(k);
  return frames;
}

std::array<double, 2> ToPolar(const Vec2& p) {
  double alpha = std::atan2(p.y(), p.x());
  if (alpha <= -kPi) alpha = kPi;
  return {p.norm(), alpha};
}

Vec2 FromPolar(double r, double alpha) { return {r * std::cos(alpha), r * std::sin(alpha)}; }

TrajectorySample MakeTrajectorySample(const Scene& scene, int frame, int scene_index) {
  if (frame < kPastSteps - 1 || frame + kFutureSteps + 1 >= scene.frame_count()) {
    Fail(ErrorKind::kInvalidArgument, "frame lacks 6 past or 6 future positions");
  }
  const Pose2D& now = scene.ego[static_cast<std::size_t>(frame)].pose;
  auto rel = [&](int k) {
    const Pose2D& p = scene.ego[static_cast<std::size_t>(k)].pose;
    return WorldToEgo(now, Vec2(p.x, p.y));
  };
  TrajectorySample out;
  for (int i = 0; i < kPastSteps; ++i) out.past[static_cast<std::size_t>(i)] = rel(frame - kPastSteps + 1 + i);
  out.past[kPastSteps - 1] = Vec2::Zero();
  for (int i = 0; i < kFutureSteps; ++i) out.future[static_cast<std::size_t>(i)] = rel(frame + 1 + i);
  out.destination = rel(frame + kFutureSteps + 1);
  const auto polar = ToPolar(out.destination);
  out.dest_r = polar[0];
  out.dest_alpha = polar[1];
  out.scene = scene_index;
  out.frame = frame;
  return out;
}

DatasetSplit SplitScenes(int n_scenes, double split_ratio, std::uint64_t seed) {
  if (n_scenes < 1) Fail(ErrorKind::kInvalidArgument, "need at least one scene");
  if (!(split_ratio > 0.0 && split_ratio <= 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "split ratio must lie in (0, 1]");
  }
  std::vector<int> order(static_cast<std::size_t>(n_scenes));
  for (int i = 0; i < n_scenes; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng::Stream(seed, "split");
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.Below(i))]);
  }
  const auto n_train = static_cast<std::size_t>(std::lround(n_scenes * split_ratio));
  DatasetSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace bevplan
