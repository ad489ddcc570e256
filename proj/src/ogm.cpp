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

#include "bevplan/ogm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bevplan/error.hpp"

namespace bevplan {

namespace {

constexpr double kNearPlane = 0.01;

Polygon ClipHalfPlane(const Polygon& poly, const Vec2& normal, double offset) {
  // Keeps points with normal·p >= offset.
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double da = normal.dot(a) - offset;
    const double db = normal.dot(b) - offset;
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) out.push_back(a + (b - a) * (da / (da - db)));
  }
  return out;
}

Polygon ClipToImage(Polygon poly, const CameraModel& cam) {
  const double xmax = cam.width() - 0.5;
  const double ymax = cam.height() - 0.5;
  poly = ClipHalfPlane(poly, Vec2(1.0, 0.0), -0.5);
  poly = ClipHalfPlane(poly, Vec2(-1.0, 0.0), -xmax);
  poly = ClipHalfPlane(poly, Vec2(0.0, 1.0), -0.5);
  poly = ClipHalfPlane(poly, Vec2(0.0, -1.0), -ymax);
  if (poly.size() < 3) poly.clear();
  return poly;
}

std::vector<Vec3> ClipNear(const std::vector<Vec3>& poly) {
  std::vector<Vec3> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % n];
    const double da = a.z() - kNearPlane;
    const double db = b.z() - kNearPlane;
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) out.push_back(a + (b - a) * (da / (da - db)));
  }
  return out;
}

double Cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Polygon ConvexHull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && Cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && Cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

void RequireBinary(const OccupancyGrid& g, const char* what) {
  if (!g.IsBinary()) Fail(ErrorKind::kInvalidArgument, std::string(what) + " grid is not binary");
}

bool CellValid(const OccupancyGrid& g, int r, int c) {
  return !g.valid || (*g.valid)(r, c) != 0;
}

}  // namespace

void GridSpec::validate() const {
  if (rows <= 0 || cols <= 0 || !(resolution > 0.0)) {
    Fail(ErrorKind::kInvalidArgument, "grid spec needs positive size and resolution");
  }
  if (anchor_row < 0 || anchor_row >= rows || anchor_col < 0 || anchor_col >= cols) {
    Fail(ErrorKind::kInvalidArgument, "grid anchor outside the grid");
  }
}

Vec2 WorldToEgo(const Pose2D& ego, const Vec2& world) {
  const double c = std::cos(ego.yaw);
  const double s = std::sin(ego.yaw);
  const double dx = world.x() - ego.x;
  const double dy = world.y() - ego.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 EgoToWorld(const Pose2D& ego, const Vec2& local) {
  const double c = std::cos(ego.yaw);
  const double s = std::sin(ego.yaw);
  return {ego.x + c * local.x() - s * local.y(), ego.y + s * local.x() + c * local.y()};
}

OccupancyGrid OccupancyGrid::Empty(const GridSpec& spec, Channel channel) {
  spec.validate();
  return OccupancyGrid{spec, RealGrid(spec.rows, spec.cols, 0.0), channel, std::nullopt};
}

bool OccupancyGrid::IsBinary() const {
  return std::all_of(cells.values().begin(), cells.values().end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

void Box3D::Validate() const {
  if (!center.allFinite() || !std::isfinite(yaw)) {
    Fail(ErrorKind::kInvalidArgument, "box has non-finite pose");
  }
  if (!(length > 0.0) || !(width > 0.0) || !(height >= 0.0)) {
    Fail(ErrorKind::kInvalidArgument, "box dimensions must be positive");
  }
}

std::array<Vec2, 4> Box3D::GroundCorners() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const Vec2 fwd(c * 0.5 * length, s * 0.5 * length);
  const Vec2 left(-s * 0.5 * width, c * 0.5 * width);
  const Vec2 mid(center.x(), center.y());
  return {mid - fwd - left, mid + fwd - left, mid + fwd + left, mid - fwd + left};
}

std::array<Vec3, 8> Box3D::Corners() const {
  const auto ground = GroundCorners();
  const double z0 = center.z() - 0.5 * height;
  const double z1 = center.z() + 0.5 * height;
  std::array<Vec3, 8> out;
  for (int i = 0; i < 4; ++i) {
    out[static_cast<std::size_t>(i)] = Vec3(ground[static_cast<std::size_t>(i)].x(),
                                            ground[static_cast<std::size_t>(i)].y(), z0);
    out[static_cast<std::size_t>(i + 4)] = Vec3(ground[static_cast<std::size_t>(i)].x(),
                                                ground[static_cast<std::size_t>(i)].y(), z1);
  }
  return out;
}

Box3D Box3D::ToEgo(const Pose2D& ego) const {
  Box3D out = *this;
  const Vec2 local = WorldToEgo(ego, Vec2(center.x(), center.y()));
  out.center = Vec3(local.x(), local.y(), center.z());
  out.yaw = yaw - ego.yaw;
  return out;
}

CellRange RegionBounds(const GridSpec& spec, RegionTag tag) {
  spec.validate();
  const int fifty = static_cast<int>(std::lround(50.0 / spec.resolution));
  const int ten = static_cast<int>(std::lround(10.0 / spec.resolution));
  const int split = std::clamp(spec.anchor_row - fifty + 1, 0, spec.rows);
  switch (tag) {
    case RegionTag::kFull:
      return {0, spec.rows, 0, spec.cols};
    case RegionTag::kClose:
      return {split, spec.anchor_row + 1, std::max(0, spec.anchor_col - ten),
              std::min(spec.cols, spec.anchor_col + ten)};
    case RegionTag::kFar:
      return {0, split, 0, spec.cols};
  }
  return {};
}

RegionTag ParseRegion(const std::string& name) {
  if (name == "full") return RegionTag::kFull;
  if (name == "close") return RegionTag::kClose;
  if (name == "far") return RegionTag::kFar;
  Fail(ErrorKind::kInvalidArgument, "unknown region '" + name + "' (full, close, far)");
}

const char* RegionName(RegionTag tag) {
  switch (tag) {
    case RegionTag::kFull:
      return "full";
    case RegionTag::kClose:
      return "close";
    case RegionTag::kFar:
      return "far";
  }
  return "?";
}

RealGrid RasterizePolygons(std::span<const Polygon> polygons, int rows, int cols) {
  RealGrid out(rows, cols, 0.0);
  std::vector<double> crossings;
  for (const Polygon& poly : polygons) {
    if (poly.size() < 3) continue;
    double min_y = poly[0].y();
    double max_y = poly[0].y();
    for (const Vec2& p : poly) {
      min_y = std::min(min_y, p.y());
      max_y = std::max(max_y, p.y());
    }
    const int r0 = std::max(0, static_cast<int>(std::ceil(min_y)));
    const int r1 = std::min(rows - 1, static_cast<int>(std::floor(max_y)));
    for (int r = r0; r <= r1; ++r) {
      crossings.clear();
      const double y = r;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        if ((a.y() <= y && y < b.y()) || (b.y() <= y && y < a.y())) {
          crossings.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
        }
      }
      std::sort(crossings.begin(), crossings.end());
      for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
        const double lo = std::ceil(crossings[i]);
        const double hi = std::ceil(crossings[i + 1]);
        const int c0 = static_cast<int>(std::max(lo, 0.0));
        const int c1 = static_cast<int>(std::min(hi, static_cast<double>(cols)));
        for (int c = c0; c < c1; ++c) out(r, c) = 1.0;
      }
    }
  }
  return out;
}

OccupancyGrid RasterizeDrivable(std::span<const Polygon> road_polygons, const Pose2D& ego,
                                const GridSpec& spec) {
  OccupancyGrid out = OccupancyGrid::Empty(spec, Channel::kDrivable);
  std::vector<Polygon> local;
  local.reserve(road_polygons.size());
  for (const Polygon& poly : road_polygons) {
    Polygon g;
    g.reserve(poly.size());
    for (const Vec2& p : poly) g.push_back(EgoToGrid(spec, WorldToEgo(ego, p)));
    local.push_back(std::move(g));
  }
  out.cells = RasterizePolygons(local, spec.rows, spec.cols);
  return out;
}

OccupancyGrid RasterizeFootprints(std::span<const Box3D> boxes, const Pose2D& ego,
                                  const GridSpec& spec) {
  OccupancyGrid out = OccupancyGrid::Empty(spec, Channel::kVehicle);
  std::vector<Polygon> local;
  local.reserve(boxes.size());
  for (const Box3D& box : boxes) {
    box.Validate();
    Polygon g;
    for (const Vec2& p : box.GroundCorners()) g.push_back(EgoToGrid(spec, WorldToEgo(ego, p)));
    local.push_back(std::move(g));
  }
  out.cells = RasterizePolygons(local, spec.rows, spec.cols);
  return out;
}

Polygon FootprintPolygonCamera(const Box3D& box, const CameraModel& cam) {
  box.Validate();
  const auto corners = box.Corners();
  std::vector<Vec3> face;
  bool any_in_front = false;
  for (int i = 0; i < 4; ++i) {
    face.push_back(cam.ToCamera(corners[static_cast<std::size_t>(i)]));
    any_in_front = any_in_front || face.back().z() > kMinDepth;
  }
  if (!any_in_front) Fail(ErrorKind::kBehindCamera, "vehicle footprint is behind the camera");
  const std::vector<Vec3> clipped = ClipNear(face);
  Polygon image;
  for (const Vec3& p : clipped) image.push_back(cam.ProjectCameraPoint(p));
  if (image.size() < 3) return {};
  return ClipToImage(std::move(image), cam);
}

Polygon SilhouettePolygonCamera(const Box3D& box, const CameraModel& cam) {
  box.Validate();
  const auto corners = box.Corners();
  std::array<Vec3, 8> pc;
  bool any_in_front = false;
  for (std::size_t i = 0; i < 8; ++i) {
    pc[i] = cam.ToCamera(corners[i]);
    any_in_front = any_in_front || pc[i].z() > kMinDepth;
  }
  if (!any_in_front) Fail(ErrorKind::kBehindCamera, "vehicle is behind the camera");
  static constexpr std::array<std::array<int, 2>, 12> kEdges = {{{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                                                 {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                                                 {0, 4}, {1, 5}, {2, 6}, {3, 7}}};
  std::vector<Vec2> pts;
  for (const auto& e : kEdges) {
    const Vec3& a = pc[static_cast<std::size_t>(e[0])];
    const Vec3& b = pc[static_cast<std::size_t>(e[1])];
    const bool fa = a.z() >= kNearPlane;
    const bool fb = b.z() >= kNearPlane;
    if (fa) pts.push_back(cam.ProjectCameraPoint(a));
    if (fb) pts.push_back(cam.ProjectCameraPoint(b));
    if (fa != fb) {
      const double t = (a.z() - kNearPlane) / (a.z() - b.z());
      pts.push_back(cam.ProjectCameraPoint(a + (b - a) * t));
    }
  }
  if (pts.size() < 3) return {};
  return ClipToImage(ConvexHull(std::move(pts)), cam);
}

double ConfusionCounts::Iou() const {
  const long long denom = tp + fp + fn;
  return denom == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

ConfusionCounts CountConfusion(const OccupancyGrid& pred, const OccupancyGrid& gt,
                               const CellRange& range) {
  if (!(pred.spec == gt.spec) || !pred.cells.same_shape(gt.cells)) {
    Fail(ErrorKind::kSpecMismatch, "IoU: prediction and ground truth grids differ in layout");
  }
  RequireBinary(pred, "prediction");
  RequireBinary(gt, "ground truth");
  ConfusionCounts counts;
  const int r1 = std::min(range.row_end, pred.cells.rows());
  const int c1 = std::min(range.col_end, pred.cells.cols());
  for (int r = std::max(0, range.row_begin); r < r1; ++r) {
    for (int c = std::max(0, range.col_begin); c < c1; ++c) {
      if (!CellValid(pred, r, c) || !CellValid(gt, r, c)) continue;
      const bool p = pred.cells(r, c) != 0.0;
      const bool g = gt.cells(r, c) != 0.0;
      if (p && g) {
        ++counts.tp;
      } else if (p) {
        ++counts.fp;
      } else if (g) {
        ++counts.fn;
      } else {
        ++counts.tn;
      }
    }
  }
  return counts;
}

double Iou(const OccupancyGrid& pred, const OccupancyGrid& gt, RegionTag region) {
  return CountConfusion(pred, gt, RegionBounds(pred.spec, region)).Iou();
}

Components ConnectedComponents(const RealGrid& grid) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  for (double v : grid.values()) {
    if (v != 0.0 && v != 1.0) Fail(ErrorKind::kInvalidArgument, "connected components need a binary grid");
  }
  // Two-pass union-find over provisional labels.
  LabelGrid provisional(rows, cols, 0);
  std::vector<int> parent{0};
  auto find = [&parent](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (grid(r, c) == 0.0) continue;
      int label = 0;
      static constexpr std::array<std::array<int, 2>, 4> kPrior = {{{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}}};
      for (const auto& d : kPrior) {
        const int rr = r + d[0];
        const int cc = c + d[1];
        if (!provisional.contains(rr, cc)) continue;
        const int n = provisional(rr, cc);
        if (n == 0) continue;
        if (label == 0) {
          label = n;
        } else {
          unite(label, n);
        }
      }
      if (label == 0) {
        label = static_cast<int>(parent.size());
        parent.push_back(label);
      }
      provisional(r, c) = label;
    }
  }
  Components out{LabelGrid(rows, cols, 0), 0};
  std::vector<int> dense(parent.size(), 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = provisional(r, c);
      if (p == 0) continue;
      const auto root = static_cast<std::size_t>(find(p));
      if (dense[root] == 0) dense[root] = ++out.count;
      out.labels(r, c) = dense[root];
    }
  }
  return out;
}

Components ConnectedComponents(const OccupancyGrid& grid) { return ConnectedComponents(grid.cells); }

RealGrid Threshold(const RealGrid& grid, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) Fail(ErrorKind::kInvalidArgument, "threshold must lie in (0, 1)");
  RealGrid out(grid.rows(), grid.cols(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values()[i] = grid.values()[i] >= tau ? 1.0 : 0.0;
  return out;
}

OccupancyGrid Threshold(const OccupancyGrid& grid, double tau) {
  OccupancyGrid out = grid;
  out.cells = Threshold(grid.cells, tau);
  return out;
}

}  // namespace bevplan
