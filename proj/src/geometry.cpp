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

#include "bevplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "bevplan/error.hpp"
#include "bevplan/linalg.hpp"

namespace bevplan {

namespace {

bool AllFinite(const Eigen::Matrix3d& m) { return m.allFinite(); }

// Hartley isotropic conditioning: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d ConditioningTransform(std::span<const Vec2> points) {
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  double mean_dist = 0.0;
  for (const Vec2& p : points) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(points.size());
  if (!(mean_dist > 0.0)) Fail(ErrorKind::kDegenerate, "DLT: all points coincide");
  const double scale = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << scale, 0.0, -scale * centroid.x(),
       0.0, scale, -scale * centroid.y(),
       0.0, 0.0, 1.0;
  return t;
}

Vec2 Transform(const Eigen::Matrix3d& t, const Vec2& p) {
  const Vec3 q = t * p.homogeneous();
  return q.hnormalized();
}

struct DesignSystem {
  Eigen::MatrixXd a;
  Eigen::Matrix3d camera_t = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d bev_t = Eigen::Matrix3d::Identity();
};

DesignSystem BuildDesign(std::span<const Correspondence> pairs, bool hartley) {
  if (pairs.size() < 4) {
    Fail(ErrorKind::kTooFewPoints,
         "DLT needs at least 4 correspondences, got " + std::to_string(pairs.size()));
  }
  std::vector<Vec2> cam;
  std::vector<Vec2> bev;
  cam.reserve(pairs.size());
  bev.reserve(pairs.size());
  for (const Correspondence& c : pairs) {
    if (!c.camera.allFinite() || !c.bev.allFinite()) {
      Fail(ErrorKind::kInvalidArgument, "DLT: non-finite correspondence");
    }
    cam.push_back(c.camera);
    bev.push_back(c.bev);
  }
  DesignSystem sys;
  if (hartley) {
    sys.camera_t = ConditioningTransform(cam);
    sys.bev_t = ConditioningTransform(bev);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());
  // At least 9 rows so the null vector of a minimal 4-point system is
  // still a column of V.
  sys.a = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(2 * n, 9), 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 p = Transform(sys.camera_t, cam[static_cast<std::size_t>(i)]);
    const Vec2 q = Transform(sys.bev_t, bev[static_cast<std::size_t>(i)]);
    const double u = p.x(), v = p.y(), x = q.x(), y = q.y();
    sys.a.row(2 * i) << -u, -v, -1.0, 0.0, 0.0, 0.0, x * u, x * v, x;
    sys.a.row(2 * i + 1) << 0.0, 0.0, 0.0, -u, -v, -1.0, y * u, y * v, y;
  }
  return sys;
}

}  // namespace

Eigen::Matrix3d NormalizeHomographyMatrix(const Eigen::Matrix3d& m) {
  const double norm = m.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    Fail(ErrorKind::kDegenerate, "homography has zero or non-finite norm");
  }
  Eigen::Matrix3d out = norm == 1.0 ? m : Eigen::Matrix3d(m / norm);
  double pivot = out(2, 2);
  if (std::abs(pivot) < kInfinityEps) {
    pivot = 0.0;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (std::abs(out(r, c)) > std::abs(pivot)) pivot = out(r, c);
      }
    }
  }
  if (pivot < 0.0) out = -out;
  return out;
}

double HomographyDistance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (NormalizeHomographyMatrix(a) - NormalizeHomographyMatrix(b)).cwiseAbs().maxCoeff();
}

Homography::Homography() : m_(NormalizeHomographyMatrix(Eigen::Matrix3d::Identity())) {}

Homography Homography::FromMatrix(const Eigen::Matrix3d& m) {
  if (!AllFinite(m)) Fail(ErrorKind::kInvalidArgument, "homography has non-finite entries");
  Eigen::Matrix3d n = NormalizeHomographyMatrix(m);
  // Entries of pixel-to-metric maps span many decades, so test the spectrum
  // rather than the determinant.
  const Eigen::VectorXd sv = JacobiSvd(n).singular_values;
  if (!(sv(2) > 1e-14 * sv(0))) Fail(ErrorKind::kDegenerate, "homography is not invertible");
  return Homography(n);
}

Homography Homography::FromRowMajor(const std::array<double, 9>& values) {
  Eigen::Matrix3d m;
  m << values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7],
      values[8];
  return FromMatrix(m);
}

Homography Homography::Translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return FromMatrix(m);
}

std::array<double, 9> Homography::RowMajor() const {
  return {m_(0, 0), m_(0, 1), m_(0, 2), m_(1, 0), m_(1, 1), m_(1, 2), m_(2, 0), m_(2, 1), m_(2, 2)};
}

Homography Homography::Inverse() const { return FromMatrix(m_.inverse()); }

Homography Homography::operator*(const Homography& other) const {
  return FromMatrix(m_ * other.m_);
}

Vec2 ApplyHomography(const Homography& h, const Vec2& p) {
  const Eigen::Matrix3d& m = h.matrix();
  const double w = m(2, 0) * p.x() + m(2, 1) * p.y() + m(2, 2);
  if (!(std::abs(w) > kInfinityEps)) {
    Fail(ErrorKind::kPointAtInfinity, "point maps to infinity");
  }
  return {(m(0, 0) * p.x() + m(0, 1) * p.y() + m(0, 2)) / w,
          (m(1, 0) * p.x() + m(1, 1) * p.y() + m(1, 2)) / w};
}

Homography EstimateHomographyDlt(std::span<const Correspondence> pairs,
                                 const DltOptions& options) {
  const DesignSystem sys = BuildDesign(pairs, options.hartley_normalization);
  const SvdResult svd = JacobiSvd(sys.a);
  const double s1 = svd.singular_values(0);
  const double s8 = svd.singular_values(7);
  if (!(s1 > 0.0) || s8 / s1 < options.rank_tolerance) {
    Fail(ErrorKind::kDegenerate, "DLT: design matrix has rank < 8 (collinear points?)");
  }
  const Eigen::VectorXd h = svd.v.col(8);
  Eigen::Matrix3d conditioned;
  conditioned << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography::FromMatrix(sys.bev_t.inverse() * conditioned * sys.camera_t);
}

double DltConditionNumber(std::span<const Correspondence> pairs, bool hartley_normalization) {
  const DesignSystem sys = BuildDesign(pairs, hartley_normalization);
  const SvdResult svd = JacobiSvd(sys.a);
  return svd.singular_values(0) / svd.singular_values(7);
}

std::vector<double> ReprojectionErrors(const Homography& h,
                                       std::span<const Correspondence> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const Correspondence& c : pairs) out.push_back((ApplyHomography(h, c.camera) - c.bev).norm());
  return out;
}

Homography RescaleHomography(const Homography& h, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    Fail(ErrorKind::kInvalidArgument, "homography scale must be positive");
  }
  const Eigen::Matrix3d scale = Eigen::Vector3d(s, s, 1.0).asDiagonal();
  const Eigen::Matrix3d inv = Eigen::Vector3d(1.0 / s, 1.0 / s, 1.0).asDiagonal();
  return Homography::FromMatrix(scale * h.matrix() * inv);
}

CameraModel::CameraModel(const CameraIntrinsics& intrinsics, const Eigen::Matrix3d& rotation,
                         const Vec3& translation, int width, int height)
    : k_(intrinsics), r_(rotation), t_(translation), width_(width), height_(height) {
  if (!(k_.fx > 0.0) || !(k_.fy > 0.0) || !std::isfinite(k_.cx) || !std::isfinite(k_.cy)) {
    Fail(ErrorKind::kInvalidArgument, "camera focal lengths must be positive");
  }
  if (!r_.allFinite() || !t_.allFinite()) {
    Fail(ErrorKind::kInvalidArgument, "camera pose has non-finite entries");
  }
  if ((r_.transpose() * r_ - Eigen::Matrix3d::Identity()).norm() >= 1e-9) {
    Fail(ErrorKind::kInvalidArgument, "camera rotation is not orthonormal");
  }
  if (width_ <= 0 || height_ <= 0) Fail(ErrorKind::kInvalidArgument, "camera image size");
}

CameraModel CameraModel::Mounted(double height_m, double pitch_rad, double horizontal_fov_rad,
                                 int width, int height, double forward_offset_m) {
  if (!(horizontal_fov_rad > 0.0 && horizontal_fov_rad < M_PI)) {
    Fail(ErrorKind::kInvalidArgument, "horizontal field of view out of range");
  }
  const Vec3 forward(std::cos(pitch_rad), 0.0, std::sin(pitch_rad));
  const Vec3 right(0.0, -1.0, 0.0);
  const Vec3 down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  const Vec3 center(forward_offset_m, 0.0, height_m);
  CameraIntrinsics k;
  k.fx = 0.5 * width / std::tan(0.5 * horizontal_fov_rad);
  k.fy = k.fx;
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  return CameraModel(k, r, -r * center, width, height);
}

CameraModel CameraModel::Scaled(double factor) const {
  if (!(factor > 0.0)) Fail(ErrorKind::kInvalidArgument, "camera scale must be positive");
  CameraIntrinsics k{k_.fx * factor, k_.fy * factor, k_.cx * factor, k_.cy * factor};
  return CameraModel(k, r_, t_, static_cast<int>(std::lround(width_ * factor)),
                     static_cast<int>(std::lround(height_ * factor)));
}

Eigen::Matrix3d CameraModel::K() const {
  Eigen::Matrix3d k;
  k << k_.fx, 0.0, k_.cx, 0.0, k_.fy, k_.cy, 0.0, 0.0, 1.0;
  return k;
}

Vec2 CameraModel::ProjectCameraPoint(const Vec3& pc) const {
  if (!(pc.z() > kMinDepth)) Fail(ErrorKind::kBehindCamera, "point is behind the camera");
  return {k_.fx * pc.x() / pc.z() + k_.cx, k_.fy * pc.y() / pc.z() + k_.cy};
}

Vec2 ProjectPoint(const CameraModel& cam, const Vec3& world) {
  return cam.ProjectCameraPoint(cam.ToCamera(world));
}

Vec2 EgoToGrid(const GridSpec& spec, const Vec2& ego) {
  return {spec.anchor_col - ego.y() / spec.resolution, spec.anchor_row - ego.x() / spec.resolution};
}

Vec2 GridToEgo(const GridSpec& spec, const Vec2& grid) {
  return {(spec.anchor_row - grid.y()) * spec.resolution,
          (spec.anchor_col - grid.x()) * spec.resolution};
}

Eigen::Matrix3d GridToEgoMatrix(const GridSpec& spec) {
  const double res = spec.resolution;
  Eigen::Matrix3d g;
  g << 0.0, -res, spec.anchor_row * res,
       -res, 0.0, spec.anchor_col * res,
       0.0, 0.0, 1.0;
  return g;
}

Homography GroundPlaneHomography(const CameraModel& cam, const GridSpec& spec) {
  spec.validate();
  Eigen::Matrix3d plane;
  plane.col(0) = cam.rotation().col(0);
  plane.col(1) = cam.rotation().col(1);
  plane.col(2) = cam.translation();
  const SvdResult svd = JacobiSvd(plane);
  if (!(svd.singular_values(2) > 1e-10 * svd.singular_values(0))) {
    Fail(ErrorKind::kDegenerate, "camera center lies on the ground plane");
  }
  const Eigen::Matrix3d grid_to_pixel = cam.K() * plane * GridToEgoMatrix(spec);
  return Homography::FromMatrix(grid_to_pixel.inverse());
}

WarpResult WarpGrid(const RealGrid& src, const Homography& src_to_dst, int dst_rows,
                    int dst_cols, double fill, Interpolation interpolation) {
  WarpResult out{RealGrid(dst_rows, dst_cols, fill), MaskGrid(dst_rows, dst_cols, 0)};
  if (src.empty()) return out;
  const Eigen::Matrix3d inv = src_to_dst.Inverse().matrix();
  const double max_x = src.cols() - 0.5;
  const double max_y = src.rows() - 0.5;
  const int last_c = src.cols() - 1;
  const int last_r = src.rows() - 1;
  for (int r = 0; r < dst_rows; ++r) {
    for (int c = 0; c < dst_cols; ++c) {
      const double w = inv(2, 0) * c + inv(2, 1) * r + inv(2, 2);
      if (!(std::abs(w) > kInfinityEps)) continue;
      const double x = (inv(0, 0) * c + inv(0, 1) * r + inv(0, 2)) / w;
      const double y = (inv(1, 0) * c + inv(1, 1) * r + inv(1, 2)) / w;
      if (!(x >= -0.5 && x <= max_x && y >= -0.5 && y <= max_y)) continue;
      double value;
      if (interpolation == Interpolation::kNearest) {
        const int sc = std::clamp(static_cast<int>(std::floor(x + 0.5)), 0, last_c);
        const int sr = std::clamp(static_cast<int>(std::floor(y + 0.5)), 0, last_r);
        value = src(sr, sc);
      } else {
        const double cx = std::clamp(x, 0.0, static_cast<double>(last_c));
        const double cy = std::clamp(y, 0.0, static_cast<double>(last_r));
        const int x0 = static_cast<int>(std::floor(cx));
        const int y0 = static_cast<int>(std::floor(cy));
        const int x1 = std::min(x0 + 1, last_c);
        const int y1 = std::min(y0 + 1, last_r);
        const double fx = cx - x0;
        const double fy = cy - y0;
        const double top = (1.0 - fx) * src(y0, x0) + fx * src(y0, x1);
        const double bottom = (1.0 - fx) * src(y1, x0) + fx * src(y1, x1);
        value = (1.0 - fy) * top + fy * bottom;
      }
      out.values(r, c) = value;
      out.valid(r, c) = 1;
    }
  }
  return out;
}

WarpResult WarpMask(const RealGrid& src, const Homography& src_to_dst, int dst_rows,
                    int dst_cols) {
  WarpResult out = WarpGrid(src, src_to_dst, dst_rows, dst_cols, 0.0, Interpolation::kBilinear);
  for (double& v : out.values.values()) v = v >= 0.5 ? 1.0 : 0.0;
  return out;
}

}  // namespace bevplan
