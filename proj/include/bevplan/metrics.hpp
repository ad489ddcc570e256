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
#include <vector>

#include "bevplan/trajectory.hpp"

namespace bevplan {

/// Mean Euclidean error over samples and steps 1..horizon_steps.
double Ade(std::span<const Trajectory> preds, std::span<const Trajectory> gts, int horizon_steps);

/// Mean Euclidean error at exactly step `step` (1-based).
double DisplacementAt(std::span<const Trajectory> preds, std::span<const Trajectory> gts, int step);

struct LatLongError {
  double l1_long = 0.0;
  double l1_lat = 0.0;
};

/// Per-step mean |longitudinal| and |lateral| error. Errors are rotated by
/// -heading so that x points along the heading at t = 0. An empty
/// `headings` means every trajectory is already in that frame.
std::vector<LatLongError> L1LatLong(std::span<const Trajectory> preds,
                                    std::span<const Trajectory> gts,
                                    std::span<const double> headings = {});

struct HorizonError {
  int steps = 0;
  double seconds = 0.0;
  double ade = 0.0;  // cumulative over steps 1..steps
  double fde = 0.0;  // at step `steps` only
  double l1_long = 0.0;
  double l1_lat = 0.0;
};

struct TrajectoryError {
  std::vector<HorizonError> horizons;
};

/// Horizons of 1, 3 and 5 steps (0.5 s, 1.5 s, 2.5 s) when they fit.
TrajectoryError EvaluateTrajectories(std::span<const Trajectory> preds,
                                     std::span<const Trajectory> gts,
                                     std::span<const double> headings = {});

/// `label,horizon_s,ade,fde,l1_long,l1_lat` rows; header included when asked.
std::string TrajectoryErrorCsv(const std::string& label, const TrajectoryError& err, bool header);

}  // namespace bevplan
