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

#include <span>
#include <string>

#include "bevplan/planner.hpp"
#include "bevplan/trajectory.hpp"

namespace bevplan {

/// 95% quantile of the chi-square distribution with 2 degrees of freedom.
inline constexpr double kChiSquare2Dof95 = 5.991464547107979;

struct Ellipse {
  Vec2 center = Vec2::Zero();
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;  // of the major axis, radians from +x
};

/// Level set of the Gaussian enclosing `chi_square` Mahalanobis mass.
Ellipse ConfidenceEllipse(const GaussianParams& g, double chi_square = kChiSquare2Dof95);

/// Top-down SVG of a sample in its ego frame (forward is up): past track,
/// ground-truth future and, when given, predicted means with 95% ellipses.
std::string TrajectorySvg(const TrajectorySample& sample, std::span<const GaussianParams> prediction,
                          double pixels_per_meter = 12.0);

}  // namespace bevplan
