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
#include <vector>

#include "bevplan/geometry.hpp"

namespace bevplan {

inline constexpr int kPastSteps = 6;    // t = -2.5 s .. 0 s
inline constexpr int kFutureSteps = 5;  // t = 0.5 s .. 2.5 s
inline constexpr double kFrameInterval = 0.5;

/// Ego motion around one frame, in the ego frame at t = 0 (x forward,
/// y left, meters).
struct TrajectorySample {
  std::array<Vec2, kPastSteps> past;      // past[5] is the current position (0, 0)
  std::array<Vec2, kFutureSteps> future;  // ground truth to plan
  Vec2 destination = Vec2::Zero();        // sixth future point
  double dest_r = 0.0;
  double dest_alpha = 0.0;                // in (-pi, pi]
  int scene = 0;
  int frame = 0;
};

/// (r, alpha) of a point, alpha in (-pi, pi].
std::array<double, 2> ToPolar(const Vec2& p);
Vec2 FromPolar(double r, double alpha);

using Trajectory = std::vector<Vec2>;

}  // namespace bevplan
