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
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "bevplan/geometry.hpp"
#include "bevplan/grid.hpp"

namespace bevplan {

/// Planar pose in the world frame.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

Vec2 WorldToEgo(const Pose2D& ego, const Vec2& world);
Vec2 EgoToWorld(const Pose2D& ego, const Vec2& local);

using Polygon = std::vector<Vec2>;

enum class Channel { kDrivable, kVehicle };

struct OccupancyGrid {
  GridSpec spec;
  RealGrid cells;
  Channel channel = Channel::kDrivable;
  std::optional<MaskGrid> valid;

  static OccupancyGrid Empty(const GridSpec& spec, Channel channel);
  bool IsBinary() const;
};

/// Oriented 3D box. `center.z` is the box center, so the ground face sits at
/// center.z - height / 2.
struct Box3D {
  Vec3 center = Vec3::Zero();
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double yaw = 0.0;

  void Validate() const;
  /// Ground-face corners (x, y), counter-clockwise.
  std::array<Vec2, 4> GroundCorners() const;
  /// Ground face first (counter-clockwise), then the top face.
  std::array<Vec3, 8> Corners() const;
  /// The same box expressed in the ego frame of `ego`.
  Box3D ToEgo(const Pose2D& ego) const;
};

enum class RegionTag { kFull, kClose, kFar };

struct CellRange {
  int row_begin = 0;
  int row_end = 0;  // exclusive
  int col_begin = 0;
  int col_end = 0;  // exclusive

  bool Contains(int r, int c) const {
    return r >= row_begin && r < row_end && c >= col_begin && c < col_end;
  }
};

/// close: 0-50 m ahead, 10 m each side; far: more than 50 m ahead.
CellRange RegionBounds(const GridSpec& spec, RegionTag tag);
RegionTag ParseRegion(const std::string& name);
const char* RegionName(RegionTag tag);

/// Cells whose center lies inside any polygon (even-odd rule, half-open
/// boundaries). Polygons are in grid coordinates.
RealGrid RasterizePolygons(std::span<const Polygon> polygons, int rows, int cols);

OccupancyGrid RasterizeDrivable(std::span<const Polygon> road_polygons, const Pose2D& ego,
                                const GridSpec& spec = {});
OccupancyGrid RasterizeFootprints(std::span<const Box3D> boxes, const Pose2D& ego,
                                  const GridSpec& spec = {});

/// Ground face of `box` (given in the camera's reference frame) projected into
/// the image and clipped to it. Empty when the face is outside the image.
/// Throws kBehindCamera when the face is entirely behind the camera.
Polygon FootprintPolygonCamera(const Box3D& box, const CameraModel& cam);

/// Convex hull of the whole projected box, clipped to the image.
Polygon SilhouettePolygonCamera(const Box3D& box, const CameraModel& cam);

struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
  /// TP / (TP + FP + FN); 1 when the union is empty.
  double Iou() const;
};

ConfusionCounts CountConfusion(const OccupancyGrid& pred, const OccupancyGrid& gt,
                               const CellRange& range);
double Iou(const OccupancyGrid& pred, const OccupancyGrid& gt, RegionTag region);

struct Components {
  LabelGrid labels;  // 0 = background, 1..count in row-major first-encounter order
  int count = 0;
};

/// 8-connected labeling of a binary grid.
Components ConnectedComponents(const RealGrid& grid);
Components ConnectedComponents(const OccupancyGrid& grid);

OccupancyGrid Threshold(const OccupancyGrid& grid, double tau);
RealGrid Threshold(const RealGrid& grid, double tau);

}  // namespace bevplan
