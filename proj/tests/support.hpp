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

// Fixtures shared by the unit tests and the acceptance runner.

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "bevplan/geometry.hpp"
#include "bevplan/random.hpp"

namespace bevplan::testing {

/// Well-conditioned projective map of a 640 x 360 image: w stays above 0.5.
inline Eigen::Matrix3d RandomHomographyMatrix(Rng& rng) {
  Eigen::Matrix3d m;
  m << rng.Uniform(0.5, 2.0), rng.Uniform(-0.5, 0.5), rng.Uniform(-50, 50),
      rng.Uniform(-0.5, 0.5), rng.Uniform(0.5, 2.0), rng.Uniform(-50, 50),
      rng.Uniform(-4e-4, 4e-4), rng.Uniform(-4e-4, 4e-4), 1.0;
  return m * rng.Uniform(0.1, 10.0);
}

inline double TriangleArea(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

/// `n` image points with no three (nearly) collinear.
inline std::vector<Vec2> RandomImagePoints(Rng& rng, int n) {
  std::vector<Vec2> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Vec2 p(rng.Uniform(0, 640), rng.Uniform(0, 360));
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i) {
      if ((pts[i] - p).norm() < 20.0) ok = false;
      for (std::size_t j = i + 1; j < pts.size() && ok; ++j) {
        if (TriangleArea(pts[i], pts[j], p) < 500.0) ok = false;
      }
    }
    if (ok) pts.push_back(p);
  }
  return pts;
}

inline std::vector<Correspondence> MapPoints(const Eigen::Matrix3d& m, const std::vector<Vec2>& pts) {
  std::vector<Correspondence> out;
  for (const Vec2& p : pts) {
    const Eigen::Vector3d q = m * Eigen::Vector3d(p.x(), p.y(), 1.0);
    out.push_back({p, Vec2(q.x() / q.z(), q.y() / q.z())});
  }
  return out;
}

}  // namespace bevplan::testing
