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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bevplan/geometry.hpp"
#include "bevplan/grid.hpp"
#include "bevplan/ogm.hpp"
#include "bevplan/trajectory.hpp"

namespace bevplan {

enum class ScenarioType { kStraight, kSlightTurn, kSharpTurn };

const char* ScenarioName(ScenarioType type);
ScenarioType ParseScenario(const std::string& name);

struct CameraConfig {
  double height_m = 1.6;
  double pitch_deg = -8.0;
  double horizontal_fov_deg = 70.0;
  int image_width = 2560;
  int image_height = 1440;
  int mask_scale = 4;  // masks are 640 x 360
};

struct SceneConfig {
  double duration_s = 20.0;
  double road_width_min = 7.0;
  double road_width_max = 12.0;
  int min_vehicles = 0;
  int max_vehicles = 8;
  /// Relative frequency of straight / slight-turn / sharp-turn roads.
  std::array<double, 3> scenario_weights = {1.0, 1.0, 1.0};
  std::optional<ScenarioType> scenario;  // forces the type when set
  double speed_min = 4.0;                // m/s
  double speed_max = 14.0;
  double accel_max = 1.0;                // m/s^2, bound on ego speed changes
  double slight_radius_min = 120.0;
  double slight_radius_max = 250.0;
  double slight_angle_deg_min = 15.0;
  double slight_angle_deg_max = 35.0;
  double sharp_radius_min = 25.0;
  double sharp_radius_max = 50.0;
  double sharp_angle_deg_min = 50.0;
  double sharp_angle_deg_max = 90.0;
  CameraConfig camera;
  GridSpec grid;

  void Validate() const;
};

/// Constant-curvature piece of the road centerline.
struct RoadSegment {
  double length = 0.0;
  double curvature = 0.0;
};

/// Road centerline starting at arc length `start_s` with the pose of the
/// s = 0 point at the world origin, heading +x.
class Road {
 public:
  Road() = default;
  Road(double start_s, double width, std::vector<RoadSegment> segments);

  double start_s() const noexcept { return start_s_; }
  double end_s() const noexcept;
  double width() const noexcept { return width_; }
  const std::vector<RoadSegment>& segments() const noexcept { return segments_; }

  Pose2D CenterPose(double s) const;
  double CurvatureAt(double s) const;
  /// Point `offset` meters to the left of the centerline.
  Vec2 LanePoint(double s, double offset) const;
  /// Projection of `p` onto the centerline starting from `s_guess`.
  double Project(const Vec2& p, double s_guess) const;
  /// Left edge forward, right edge backward, sampled every `step` meters
  /// over [s0, s1].
  Polygon ToPolygon(double s0, double s1, double step = 0.5) const;

 private:
  double start_s_ = 0.0;
  double width_ = 0.0;
  std::vector<RoadSegment> segments_;
  std::vector<Pose2D> segment_start_;
  std::vector<double> segment_s_;
};

/// Vehicle driving along a lane at constant speed (negative = oncoming).
struct VehicleTrack {
  double s0 = 0.0;
  double speed = 0.0;
  double lane_offset = 0.0;
  double length = 4.5;
  double width = 1.9;
  double height = 1.6;

  Box3D BoxAt(const Road& road, double t) const;
};

struct EgoState {
  double t = 0.0;
  Pose2D pose;
  double speed = 0.0;
  double s = 0.0;  // arc length of the closest centerline point
};

inline constexpr double kEgoLength = 4.5;
inline constexpr double kEgoWidth = 1.9;

struct Scene {
  std::uint64_t seed = 0;
  ScenarioType type = ScenarioType::kStraight;
  Road road;
  std::vector<Polygon> road_polygons;  // world frame
  std::vector<VehicleTrack> vehicles;
  std::vector<EgoState> ego;           // one state per 0.5 s frame
  CameraConfig camera;
  GridSpec grid;

  int frame_count() const noexcept { return static_cast<int>(ego.size()); }
  std::vector<Box3D> VehicleBoxes(int frame) const;
  /// Road polygon restricted to the stretch around the ego at `frame`.
  std::vector<Polygon> LocalRoadPolygons(int frame) const;
  CameraModel FullCamera() const;  // in the ego frame
  CameraModel MaskCamera() const;
};

Scene GenerateScene(std::uint64_t seed, const SceneConfig& config);

OccupancyGrid BevDrivable(const Scene& scene, int frame);
OccupancyGrid BevVehicles(const Scene& scene, int frame);

/// Camera-view ground-truth masks of one frame, at mask resolution.
struct CameraFrame {
  RealGrid drivable;
  RealGrid vehicles;
  Homography homography;  // mask pixels -> BEV grid coordinates
};

/// Full-resolution ground-plane homography carried to mask resolution with
/// the rescaling S·H·S⁻¹ and then re-expressed in 0.1 m grid units.
Homography MaskHomography(const CameraModel& full_camera, int mask_scale, const GridSpec& spec);

CameraFrame RenderMasks(const Scene& scene, int frame);

struct MaskNoise {
  double dropout = 0.0;       // probability of clearing an occupied cell
  double jitter_sigma = 0.0;  // boundary displacement std dev, cells
  int blur_radius = 0;        // box blur radius, cells
  double jitter_spacing = 16.0;

  bool IsZero() const { return dropout == 0.0 && jitter_sigma == 0.0 && blur_radius == 0; }
};

/// Imperfect-segmentation model: smooth random displacement of the mask,
/// Bernoulli dropout, then box blur.
RealGrid CorruptMask(const RealGrid& mask, const MaskNoise& noise, std::uint64_t seed);

/// Frames with 6 past and 6 future positions available.
std::vector<int> SampleFrames(const Scene& scene);
TrajectorySample MakeTrajectorySample(const Scene& scene, int frame, int scene_index = 0);

struct DatasetSplit {
  std::vector<int> train;  // scene indices
  std::vector<int> test;
};

/// Scene-level split; scene order is a seeded permutation.
DatasetSplit SplitScenes(int n_scenes, double split_ratio, std::uint64_t seed);

struct DatasetManifest {
  std::uint64_t seed = 0;
  int n_scenes = 0;
  double split_ratio = 0.0;
  DatasetSplit split;
  std::vector<int> samples_per_scene;
  int train_samples = 0;
  int test_samples = 0;
};

/// Generates `n_scenes` scenes and writes them with their masks and samples
/// under `out_dir`. Validates everything before touching the filesystem.
DatasetManifest BuildDataset(int n_scenes, double split_ratio, std::uint64_t seed,
                             const std::filesystem::path& out_dir, const SceneConfig& config);

}  // namespace bevplan
