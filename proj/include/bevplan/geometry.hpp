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
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bevplan/grid.hpp"

namespace bevplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kInfinityEps = 1e-12;

/// Planar projective map, stored with unit Frobenius norm and h33 >= 0
/// (largest-magnitude entry positive when h33 vanishes).
class Homography {
 public:
  Homography();  // identity

  /// Normalizes `m`; throws kDegenerate when the result is singular.
  static Homography FromMatrix(const Eigen::Matrix3d& m);
  static Homography FromRowMajor(const std::array<double, 9>& values);
  static Homography Translation(double tx, double ty);

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  std::array<double, 9> RowMajor() const;
  Homography Inverse() const;

  /// this ∘ other: apply `other` first.
  Homography operator*(const Homography& other) const;

 private:
  explicit Homography(const Eigen::Matrix3d& normalized) : m_(normalized) {}
  Eigen::Matrix3d m_;
};

Eigen::Matrix3d NormalizeHomographyMatrix(const Eigen::Matrix3d& m);

/// Largest absolute element difference after normalizing both matrices.
double HomographyDistance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

Vec2 ApplyHomography(const Homography& h, const Vec2& p);

struct Correspondence {
  Vec2 camera;  // pixels
  Vec2 bev;     // grid coordinates (x = column, y = row)
};

struct DltOptions {
  bool hartley_normalization = true;
  double rank_tolerance = 1e-10;  // sigma_8 / sigma_1 below this is degenerate
};

Homography EstimateHomographyDlt(std::span<const Correspondence> pairs,
                                 const DltOptions& options = {});

/// sigma_1 / sigma_8 of the 2N x 9 DLT design matrix.
double DltConditionNumber(std::span<const Correspondence> pairs, bool hartley_normalization);

/// Per-pair distance between H(camera) and bev, in grid units.
std::vector<double> ReprojectionErrors(const Homography& h,
                                       std::span<const Correspondence> pairs);

/// S·H·S⁻¹ with S = diag(s, s, 1).
Homography RescaleHomography(const Homography& h, double s);

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Pinhole camera. `rotation`/`translation` map points from the reference
/// frame into the camera frame (x right, y down, z forward).
class CameraModel {
 public:
  CameraModel(const CameraIntrinsics& intrinsics, const Eigen::Matrix3d& rotation,
              const Vec3& translation, int width, int height);

  /// Forward-looking camera rigidly mounted on a vehicle whose frame has
  /// x forward, y left, z up. Negative pitch tilts the optical axis down.
  static CameraModel Mounted(double height_m, double pitch_rad, double horizontal_fov_rad,
                             int width, int height, double forward_offset_m = 0.0);

  /// Same pose; intrinsics and image size multiplied by `factor`.
  CameraModel Scaled(double factor) const;

  const CameraIntrinsics& intrinsics() const noexcept { return k_; }
  const Eigen::Matrix3d& rotation() const noexcept { return r_; }
  const Vec3& translation() const noexcept { return t_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Eigen::Matrix3d K() const;

  Vec3 ToCamera(const Vec3& p) const { return r_ * p + t_; }
  Vec2 ProjectCameraPoint(const Vec3& pc) const;

 private:
  CameraIntrinsics k_;
  Eigen::Matrix3d r_;
  Vec3 t_;
  int width_;
  int height_;
};

inline constexpr double kMinDepth = 1e-6;

Vec2 ProjectPoint(const CameraModel& cam, const Vec3& world);

// Ego-metric (x forward, y left) <-> grid coordinates (x = column, y = row).
Vec2 EgoToGrid(const GridSpec& spec, const Vec2& ego);
Vec2 GridToEgo(const GridSpec& spec, const Vec2& grid);
/// Homogeneous matrix of GridToEgo.
Eigen::Matrix3d GridToEgoMatrix(const GridSpec& spec);

/// Camera pixels of z = 0 points of the camera's reference frame to BEV grid
/// coordinates.
Homography GroundPlaneHomography(const CameraModel& cam, const GridSpec& spec);

enum class Interpolation { kBilinear, kNearest };

struct WarpResult {
  RealGrid values;
  MaskGrid valid;  // 1 where the preimage lies inside the source
};

/// Inverse-mapping warp: destination cell q samples `src` at H⁻¹(q), where
/// `src_to_dst` maps source plane coordinates to destination coordinates.
WarpResult WarpGrid(const RealGrid& src, const Homography& src_to_dst, int dst_rows,
                    int dst_cols, double fill = 0.0,
                    Interpolation interpolation = Interpolation::kBilinear);

/// Binary mask warp: bilinear on the 0/1 values, re-thresholded at 0.5.
WarpResult WarpMask(const RealGrid& src, const Homography& src_to_dst, int dst_rows,
                    int dst_cols);

}  // namespace bevplan
