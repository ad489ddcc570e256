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

#include "bevplan/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "bevplan/error.hpp"

namespace bevplan {

namespace {

void CheckLengths(std::span<const Trajectory> preds, std::span<const Trajectory> gts, int steps) {
  if (preds.size() != gts.size()) {
    Fail(ErrorKind::kInvalidArgument, "prediction and ground-truth counts differ");
  }
  if (preds.empty()) Fail(ErrorKind::kInvalidArgument, "no trajectories to evaluate");
  if (steps < 1) Fail(ErrorKind::kInvalidArgument, "horizon must be at least one step");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != gts[i].size()) {
      Fail(ErrorKind::kInvalidArgument, "trajectory lengths differ");
    }
    if (preds[i].size() < static_cast<std::size_t>(steps)) {
      Fail(ErrorKind::kInvalidArgument, "trajectory shorter than the horizon");
    }
  }
}

}  // namespace

double Ade(std::span<const Trajectory> preds, std::span<const Trajectory> gts, int horizon_steps) {
  CheckLengths(preds, gts, horizon_steps);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (int t = 0; t < horizon_steps; ++t) sum += (preds[i][t] - gts[i][t]).norm();
  }
  return sum / (static_cast<double>(preds.size()) * horizon_steps);
}

double DisplacementAt(std::span<const Trajectory> preds, std::span<const Trajectory> gts, int step) {
  CheckLengths(preds, gts, step);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += (preds[i][step - 1] - gts[i][step - 1]).norm();
  return sum / static_cast<double>(preds.size());
}

std::vector<LatLongError> L1LatLong(std::span<const Trajectory> preds,
                                    std::span<const Trajectory> gts,
                                    std::span<const double> headings) {
  CheckLengths(preds, gts, 1);
  if (!headings.empty() && headings.size() != preds.size()) {
    Fail(ErrorKind::kInvalidArgument, "need one heading per trajectory");
  }
  const std::size_t steps = preds.front().size();
  std::vector<LatLongError> out(steps);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != steps) Fail(ErrorKind::kInvalidArgument, "trajectory lengths differ");
    const double h = headings.empty() ? 0.0 : headings[i];
    if (!std::isfinite(h)) Fail(ErrorKind::kInvalidArgument, "heading must be finite");
    const double c = std::cos(h);
    const double s = std::sin(h);
    for (std::size_t t = 0; t < steps; ++t) {
      const Vec2 d = preds[i][t] - gts[i][t];
      out[t].l1_long += std::abs(c * d.x() + s * d.y());
      out[t].l1_lat += std::abs(-s * d.x() + c * d.y());
    }
  }
  const double n = static_cast<double>(preds.size());
  for (LatLongError& e : out) {
    e.l1_long /= n;
    e.l1_lat /= n;
  }
  return out;
}

TrajectoryError EvaluateTrajectories(std::span<const Trajectory> preds,
                                     std::span<const Trajectory> gts,
                                     std::span<const double> headings) {
  CheckLengths(preds, gts, 1);
  const auto l1 = L1LatLong(preds, gts, headings);
  TrajectoryError err;
  for (int steps : {1, 3, 5}) {
    if (static_cast<std::size_t>(steps) > l1.size()) break;
    HorizonError h;
    h.steps = steps;
    h.seconds = steps * kFrameInterval;
    h.ade = Ade(preds, gts, steps);
    h.fde = DisplacementAt(preds, gts, steps);
    h.l1_long = l1[steps - 1].l1_long;
    h.l1_lat = l1[steps - 1].l1_lat;
    err.horizons.push_back(h);
  }
  return err;
}

std::string TrajectoryErrorCsv(const std::string& label, const TrajectoryError& err, bool header) {
  std::ostringstream os;
  os << std::setprecision(6);
  if (header) os << "label,horizon_s,ade,fde,l1_long,l1_lat\n";
  for (const HorizonError& h : err.horizons) {
    os << label << ',' << h.seconds << ',' << h.ade << ',' << h.fde << ',' << h.l1_long << ','
       << h.l1_lat << '\n';
  }
  return os.str();
}

}  // namespace bevplan
