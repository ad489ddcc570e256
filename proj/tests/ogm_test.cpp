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

#include <cmath>
#include <numbers>
#include <queue>

#include <gtest/gtest.h>

#include "bevplan/error.hpp"
#include "bevplan/geometry.hpp"
#include "bevplan/ogm.hpp"
#include "bevplan/random.hpp"

namespace bevplan {
namespace {

constexpr double kPi = std::numbers::pi;

long long Count(const RealGrid& g) {
  long long n = 0;
  for (double v : g.values()) n += v > 0.5;
  return n;
}

Box3D MakeBox(double x, double y, double l, double w, double h, double yaw) {
  Box3D b;
  b.center = Vec3(x, y, h / 2);
  b.length = l;
  b.width = w;
  b.height = h;
  b.yaw = yaw;
  return b;
}

OccupancyGrid FromCells(const RealGrid& cells, Channel channel = Channel::kDrivable) {
  OccupancyGrid g = OccupancyGrid::Empty(GridSpec{}, channel);
  g.cells = cells;
  return g;
}

// Independent breadth-first flood fill, 8-connected.
int FloodFillCount(const RealGrid& g) {
  Grid<int> seen(g.rows(), g.cols(), 0);
  int count = 0;
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      if (g(r, c) < 0.5 || seen(r, c)) continue;
      ++count;
      std::queue<std::pair<int, int>> q;
      q.push({r, c});
      seen(r, c) = 1;
      while (!q.empty()) {
        const auto [y, x] = q.front();
        q.pop();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (g.contains(ny, nx) && g(ny, nx) > 0.5 && !seen(ny, nx)) {
              seen(ny, nx) = 1;
              q.push({ny, nx});
            }
          }
        }
      }
    }
  }
  return count;
}

TEST(GridSpec, DefaultLayout) {
  const GridSpec spec;
  EXPECT_NO_THROW(spec.validate());
  EXPECT_DOUBLE_EQ(spec.rows * spec.resolution, 100.0);
  EXPECT_DOUBLE_EQ(spec.cols * spec.resolution, 55.0);
  GridSpec bad = spec;
  bad.anchor_row = 1000;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Regions, BoundsAndDisjointness) {
  const GridSpec spec;
  const CellRange close = RegionBounds(spec, RegionTag::kClose);
  const CellRange far = RegionBounds(spec, RegionTag::kFar);
  EXPECT_EQ(close.row_begin, 500);
  EXPECT_EQ(close.row_end, 1000);
  EXPECT_EQ(close.col_begin, 200);
  EXPECT_EQ(close.col_end, 400);
  EXPECT_EQ(far.row_begin, 0);
  EXPECT_EQ(far.row_end, 500);
  EXPECT_EQ(far.col_begin, 0);
  EXPECT_EQ(far.col_end, 550);
  EXPECT_EQ(ParseRegion("close"), RegionTag::kClose);
  EXPECT_THROW(ParseRegion("middle"), Error);
}

TEST(RasterizeDrivable, NoPolygonsGivesEmptyGrid) {
  const OccupancyGrid g = RasterizeDrivable({}, Pose2D{});
  EXPECT_EQ(Count(g.cells), 0);
  EXPECT_TRUE(g.IsBinary());
}

TEST(RasterizeDrivable, HalfPlaneAheadFillsRowsBeforeAnchor) {
  const Polygon ahead = {{0.01, -1000}, {1000, -1000}, {1000, 1000}, {0.01, 1000}};
  const OccupancyGrid g = RasterizeDrivable(std::vector<Polygon>{ahead}, Pose2D{});
  for (int r = 0; r < g.cells.rows(); ++r) {
    for (int c = 0; c < g.cells.cols(); ++c) {
      ASSERT_EQ(g.cells(r, c), r < g.spec.anchor_row ? 1.0 : 0.0) << r << "," << c;
    }
  }
}

TEST(RasterizeDrivable, RotatedStraightRoadMatchesArea) {
  // 20 m wide road through the ego position along heading 37 degrees; the
  // grid is heading aligned so the road is a 20 m band along the grid rows.
  const double yaw = 37.0 * kPi / 180.0;
  const Pose2D ego{12.0, -4.0, yaw};
  const Vec2 dir(std::cos(yaw), std::sin(yaw));
  const Vec2 left(-dir.y(), dir.x());
  const Vec2 o(ego.x, ego.y);
  const Polygon road = {o - 500 * dir - 10 * left, o + 500 * dir - 10 * left,
                        o + 500 * dir + 10 * left, o - 500 * dir + 10 * left};
  const OccupancyGrid g = RasterizeDrivable(std::vector<Polygon>{road}, ego);
  const double area = 100.0 * 20.0;  // grid length times road width
  EXPECT_NEAR(Count(g.cells) * 0.01, area, 0.01 * area);
}

TEST(RasterizeFootprints, EmptyListGivesEmptyGrid) {
  EXPECT_EQ(Count(RasterizeFootprints({}, Pose2D{}).cells), 0);
}

TEST(RasterizeFootprints, BoxTenMetersAhead) {
  const std::vector<Box3D> boxes = {MakeBox(10, 0, 4, 2, 1.5, 0)};
  const OccupancyGrid g = RasterizeFootprints(boxes, Pose2D{});
  int rmin = 10000, rmax = -1, cmin = 10000, cmax = -1;
  for (int r = 0; r < g.cells.rows(); ++r) {
    for (int c = 0; c < g.cells.cols(); ++c) {
      if (g.cells(r, c) < 0.5) continue;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  EXPECT_NEAR(rmax - rmin + 1, 40, 1);
  EXPECT_NEAR(cmax - cmin + 1, 20, 1);
  EXPECT_NEAR(0.5 * (rmin + rmax), 999 - 100, 1);
  EXPECT_NEAR(0.5 * (cmin + cmax), 300, 1);
  EXPECT_NEAR(Count(g.cells), 800, 60);
}

TEST(RasterizeFootprints, AreaOfSeparatedBoxes) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Box3D> boxes;
    double area = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double l = rng.Uniform(3.5, 6), w = rng.Uniform(1.6, 2.5);
      // One box per 15 m slot: never overlapping.
      boxes.push_back(MakeBox(8 + 15.0 * k, rng.Uniform(-10, 10), l, w, 1.5, rng.Uniform(-kPi, kPi)));
      area += l * w;
    }
    const double got = Count(RasterizeFootprints(boxes, Pose2D{}).cells) * 0.01;
    EXPECT_NEAR(got, area, 0.02 * area);
  }
}

TEST(RasterizeFootprints, RotationEquivariance) {
  Rng rng(4);
  std::vector<Box3D> boxes;
  for (int k = 0; k < 4; ++k) {
    boxes.push_back(MakeBox(rng.Uniform(5, 80), rng.Uniform(-20, 20), 4.5, 1.9, 1.6, rng.Uniform(-3, 3)));
  }
  const Pose2D ego{3.0, 1.0, 0.3};
  const OccupancyGrid a = RasterizeFootprints(boxes, ego);
  // Rotate the world (boxes and ego) by a quarter turn about the origin.
  // Quarter turns are exact in floating point, so the grids must match.
  auto rot = [](const Vec2& p) { return Vec2(-p.y(), p.x()); };
  std::vector<Box3D> rb = boxes;
  for (Box3D& b : rb) {
    const Vec2 c = rot(b.center.head<2>());
    b.center.x() = c.x();
    b.center.y() = c.y();
    b.yaw += kPi / 2;
  }
  const Vec2 e = rot({ego.x, ego.y});
  const OccupancyGrid b = RasterizeFootprints(rb, {e.x(), e.y(), ego.yaw + kPi / 2});
  long long diff = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) diff += a.cells.values()[i] != b.cells.values()[i];
  // Only cells whose centers sit on an edge up to rounding may differ.
  EXPECT_LE(diff, 4);
}

TEST(FootprintCamera, SymmetricTrapezoidOnAxis) {
  const CameraModel cam = CameraModel::Mounted(1.6, 0.0, 70 * kPi / 180, 640, 360);
  const Polygon poly = FootprintPolygonCamera(MakeBox(15, 0, 4, 2, 1.5, 0), cam);
  ASSERT_EQ(poly.size(), 4u);
  double sum_x = 0.0;
  for (const Vec2& p : poly) sum_x += p.x();
  EXPECT_NEAR(sum_x / 4, 320.0, 1e-9);
  // Near edge wider than far edge.
  double near_w = 0, far_w = 0, ymax = -1, ymin = 1e9;
  for (const Vec2& p : poly) {
    ymax = std::max(ymax, p.y());
    ymin = std::min(ymin, p.y());
  }
  for (const Vec2& p : poly) {
    (std::abs(p.y() - ymax) < 1e-9 ? near_w : far_w) += std::abs(p.x() - 320.0);
  }
  EXPECT_GT(near_w, far_w);
}

TEST(FootprintCamera, BehindCameraThrows) {
  const CameraModel cam = CameraModel::Mounted(1.6, 0.0, 70 * kPi / 180, 640, 360);
  try {
    FootprintPolygonCamera(MakeBox(-20, 0, 4, 2, 1.5, 0), cam);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBehindCamera);
  }
}

TEST(FootprintCamera, FootprintWarpBeatsSilhouetteWarp) {
  const CameraModel full = CameraModel::Mounted(1.6, -8 * kPi / 180, 70 * kPi / 180, 2560, 1440);
  const CameraModel cam = full.Scaled(0.25);
  const GridSpec spec;
  const Homography h = GroundPlaneHomography(cam, spec);
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Box3D box = MakeBox(rng.Uniform(8, 30), rng.Uniform(-4, 4), 4.5, 1.9,
                              rng.Uniform(1.0, 2.5), rng.Uniform(-0.5, 0.5));
    const OccupancyGrid gt = RasterizeFootprints(std::vector<Box3D>{box}, Pose2D{}, spec);
    auto warped_iou = [&](const Polygon& poly) {
      const RealGrid mask = RasterizePolygons(std::vector<Polygon>{poly}, cam.height(), cam.width());
      const OccupancyGrid pred = FromCells(WarpMask(mask, h, spec.rows, spec.cols).values, Channel::kVehicle);
      return Iou(pred, gt, RegionTag::kFull);
    };
    const double foot = warped_iou(FootprintPolygonCamera(box, cam));
    const double sil = warped_iou(SilhouettePolygonCamera(box, cam));
    EXPECT_GT(foot, 0.8);
    EXPECT_GT(foot, sil);
  }
}

TEST(Iou, IdenticalAndDisjoint) {
  RealGrid a(1000, 550, 0.0), b(1000, 550, 0.0);
  for (int r = 100; r < 200; ++r) {
    for (int c = 100; c < 150; ++c) a(r, c) = 1.0;
    for (int c = 300; c < 350; ++c) b(r, c) = 1.0;
  }
  EXPECT_DOUBLE_EQ(Iou(FromCells(a), FromCells(a), RegionTag::kFull), 1.0);
  EXPECT_DOUBLE_EQ(Iou(FromCells(a), FromCells(b), RegionTag::kFull), 0.0);
  const RealGrid empty(1000, 550, 0.0);
  EXPECT_DOUBLE_EQ(Iou(FromCells(empty), FromCells(empty), RegionTag::kClose), 1.0);
}

TEST(Iou, ShiftedStripeClosedForm) {
  for (int k : {2, 3, 5, 10, 40}) {
    RealGrid a(1000, 550, 0.0), b(1000, 550, 0.0);
    for (int r = 0; r < 1000; ++r) {
      for (int c = 250; c < 250 + k; ++c) a(r, c) = 1.0;
      for (int c = 251; c < 251 + k; ++c) b(r, c) = 1.0;
    }
    EXPECT_NEAR(Iou(FromCells(a), FromCells(b), RegionTag::kFull), double(k - 1) / (k + 1), 1e-15);
  }
}

TEST(Iou, SymmetricAndRegionPartition) {
  Rng rng(5);
  RealGrid a(1000, 550), b(1000, 550);
  for (double& v : a.values()) v = rng.Uniform() < 0.3;
  for (double& v : b.values()) v = rng.Uniform() < 0.4;
  const OccupancyGrid pa = FromCells(a), pb = FromCells(b);
  EXPECT_DOUBLE_EQ(Iou(pa, pb, RegionTag::kFar), Iou(pb, pa, RegionTag::kFar));
  const GridSpec spec;
  const CellRange full = RegionBounds(spec, RegionTag::kFull);
  const CellRange close = RegionBounds(spec, RegionTag::kClose);
  ConfusionCounts sum = CountConfusion(pa, pb, close);
  // Complement of the close box: three rectangles.
  sum += CountConfusion(pa, pb, {0, 500, 0, 550});
  sum += CountConfusion(pa, pb, {500, 1000, 0, 200});
  sum += CountConfusion(pa, pb, {500, 1000, 400, 550});
  EXPECT_EQ(sum, CountConfusion(pa, pb, full));
}

TEST(Iou, ValidityMaskExcludesCells) {
  RealGrid a(1000, 550, 0.0), b(1000, 550, 0.0);
  a(10, 10) = 1.0;  // false positive outside the valid region
  b(20, 20) = a(20, 20) = 1.0;
  OccupancyGrid pa = FromCells(a);
  pa.valid = MaskGrid(1000, 550, 1);
  (*pa.valid)(10, 10) = 0;
  EXPECT_DOUBLE_EQ(Iou(pa, FromCells(b), RegionTag::kFull), 1.0);
}

TEST(Iou, SpecMismatchAndNonBinaryRejected) {
  OccupancyGrid a = FromCells(RealGrid(1000, 550, 0.0));
  OccupancyGrid b = a;
  b.spec.anchor_col = 301;
  try {
    Iou(a, b, RegionTag::kFull);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSpecMismatch);
  }
  OccupancyGrid c = a;
  c.cells(0, 0) = 0.5;
  EXPECT_THROW(Iou(c, a, RegionTag::kFull), Error);
}

TEST(ConnectedComponents, EmptyAndSeparatedBlobs) {
  EXPECT_EQ(ConnectedComponents(RealGrid(20, 20, 0.0)).count, 0);
  RealGrid g(20, 20, 0.0);
  for (int r = 2; r < 6; ++r) {
    for (int c = 2; c < 6; ++c) g(r, c) = 1.0;
    for (int c = 7; c < 10; ++c) g(r, c) = 1.0;
  }
  const Components comp = ConnectedComponents(g);
  EXPECT_EQ(comp.count, 2);
  EXPECT_EQ(comp.labels(2, 2), 1);
  EXPECT_EQ(comp.labels(2, 7), 2);
  EXPECT_EQ(comp.labels(0, 0), 0);
}

TEST(ConnectedComponents, DiagonalNeighboursJoin) {
  RealGrid g(5, 5, 0.0);
  g(0, 0) = g(1, 1) = g(2, 2) = 1.0;
  g(4, 0) = 1.0;
  const Components comp = ConnectedComponents(g);
  EXPECT_EQ(comp.count, 2);
  EXPECT_EQ(comp.labels(2, 2), 1);
  EXPECT_EQ(comp.labels(4, 0), 2);
}

TEST(ConnectedComponents, MatchesFloodFillOnRandomBlobs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    RealGrid g(60, 80, 0.0);
    const double p = rng.Uniform(0.2, 0.6);
    for (double& v : g.values()) v = rng.Uniform() < p ? 1.0 : 0.0;
    const Components comp = ConnectedComponents(g);
    EXPECT_EQ(comp.count, FloodFillCount(g)) << "seed " << seed;
    // Dense labels in row-major first-encounter order.
    int next = 1;
    for (int label : comp.labels.values()) {
      if (label == next) ++next;
      ASSERT_LT(label, next);
    }
    EXPECT_EQ(next - 1, comp.count);
  }
}

TEST(Threshold, ConstantsAndIdempotence) {
  const RealGrid hi = Threshold(RealGrid(4, 4, 0.7), 0.5);
  const RealGrid lo = Threshold(RealGrid(4, 4, 0.3), 0.5);
  for (double v : hi.values()) EXPECT_EQ(v, 1.0);
  for (double v : lo.values()) EXPECT_EQ(v, 0.0);
  Rng rng(2);
  RealGrid g(30, 30);
  for (double& v : g.values()) v = rng.Uniform();
  const RealGrid once = Threshold(g, 0.4);
  EXPECT_EQ(Threshold(once, 0.4), once);
  EXPECT_THROW(Threshold(g, 1.0), Error);
  EXPECT_THROW(Threshold(g, 0.0), Error);
}

}  // namespace
}  // namespace bevplan
