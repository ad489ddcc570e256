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

#include "bevplan/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bevplan {

Ellipse ConfidenceEllipse(const GaussianParams& g, double chi_square) {
  g.Validate();
  const double a = g.sigma_x * g.sigma_x;
  const double d = g.sigma_y * g.sigma_y;
  const double b = g.rho * g.sigma_x * g.sigma_y;
  const double mean = 0.5 * (a + d);
  const double half = std::hypot(0.5 * (a - d), b);
  Ellipse e;
  e.center = g.mean();
  e.semi_major = std::sqrt(chi_square * (mean + half));
  e.semi_minor = std::sqrt(chi_square * std::max(0.0, mean - half));
  e.angle = 0.5 * std::atan2(2.0 * b, a - d);
  return e;
}

std::string TrajectorySvg(const TrajectorySample& sample, std::span<const GaussianParams> prediction,
                          double pixels_per_meter) {
  // Ego frame to SVG: forward (x) is up, left (y) is left.
  double min_x = -2.0, max_x = 2.0, min_y = -2.0, max_y = 2.0;
  auto extend = [&](const Vec2& p, double pad) {
    min_x = std::min(min_x, p.x() - pad);
    max_x = std::max(max_x, p.x() + pad);
    min_y = std::min(min_y, p.y() - pad);
    max_y = std::max(max_y, p.y() + pad);
  };
  for (const Vec2& p : sample.past) extend(p, 1.0);
  for (const Vec2& p : sample.future) extend(p, 1.0);
  extend(sample.destination, 1.0);
  std::vector<Ellipse> ellipses;
  for (const GaussianParams& g : prediction) {
    ellipses.push_back(ConfidenceEllipse(g));
    extend(g.mean(), ellipses.back().semi_major + 0.5);
  }
  const double w = (max_y - min_y) * pixels_per_meter;
  const double h = (max_x - min_x) * pixels_per_meter;
  auto sx = [&](const Vec2& p) { return (max_y - p.y()) * pixels_per_meter; };
  auto sy = [&](const Vec2& p) { return (max_x - p.x()) * pixels_per_meter; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto polyline = [&](auto begin, auto end, const char* color, const char* id) {
    os << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\" points=\"";
    for (auto it = begin; it != end; ++it) os << sx(*it) << ',' << sy(*it) << ' ';
    os << "\"/>\n";
  };
  polyline(sample.past.begin(), sample.past.end(), "gray", "past");
  std::vector<Vec2> gt = {Vec2::Zero()};
  gt.insert(gt.end(), sample.future.begin(), sample.future.end());
  polyline(gt.begin(), gt.end(), "green", "ground_truth");
  os << "<circle id=\"destination\" cx=\"" << sx(sample.destination) << "\" cy=\""
     << sy(sample.destination) << "\" r=\"4\" fill=\"none\" stroke=\"green\"/>\n";
  if (!prediction.empty()) {
    std::vector<Vec2> mean = {Vec2::Zero()};
    for (const GaussianParams& g : prediction) mean.push_back(g.mean());
    polyline(mean.begin(), mean.end(), "red", "prediction");
    for (const Ellipse& e : ellipses) {
      // Screen axes are a reflection of the ego axes, so the angle flips sign
      // and is measured from the screen's up direction.
      const double deg = -e.angle * 180.0 / std::numbers::pi - 90.0;
      os << "<ellipse class=\"confidence95\" cx=\"" << sx(e.center) << "\" cy=\"" << sy(e.center)
         << "\" rx=\"" << e.semi_major * pixels_per_meter << "\" ry=\""
         << e.semi_minor * pixels_per_meter << "\" transform=\"rotate(" << deg << ' '
         << sx(e.center) << ' ' << sy(e.center) << ")\" fill=\"red\" fill-opacity=\"0.15\" "
         << "stroke=\"red\" stroke-width=\"1\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bevplan
