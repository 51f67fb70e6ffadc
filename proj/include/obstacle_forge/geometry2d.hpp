// Copyright 2026 The obstacle-forge Authors
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

#ifndef OBSTACLE_FORGE_GEOMETRY2D_HPP
#define OBSTACLE_FORGE_GEOMETRY2D_HPP

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace obstacle_forge
{

using Polygon2 = std::vector<Eigen::Vector2d>;

/// z of (b - a) x (c - a).
inline double cross(const Eigen::Vector2d & a, const Eigen::Vector2d & b, const Eigen::Vector2d & c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

/// Andrew's monotone chain. Counter-clockwise, no repeated or collinear
/// vertices; fewer than 3 vertices when the input is degenerate.
Polygon2 convex_hull(std::span<const Eigen::Vector2d> points);

double polygon_area(std::span<const Eigen::Vector2d> polygon);

/// x-interval of a convex CCW polygon on the horizontal line y, widened by
/// `tolerance`. nullopt when the line misses the polygon.
std::optional<std::pair<double, double>> scanline_span(
  std::span<const Eigen::Vector2d> hull, double y, double tolerance = 1e-9);

struct OrientedRect
{
  Eigen::Vector2d center{Eigen::Vector2d::Zero()};
  double length{0.0};  // longer side
  double width{0.0};   // shorter side
  double theta{0.0};   // direction of the longer side, in (-pi/2, pi/2]
  bool degenerate{false};

  double area() const { return length * width; }
  std::array<Eigen::Vector2d, 4> corners() const;
};

/// Minimum-area enclosing rectangle by rotating calipers over the hull of
/// `points`. Falls back to the axis-aligned box (theta 0, degenerate) when
/// the hull has fewer than 3 vertices.
OrientedRect min_area_rect(std::span<const Eigen::Vector2d> points);

/// Rectangle with one side parallel to hull edge `edge` (hull CCW).
OrientedRect rect_for_edge(std::span<const Eigen::Vector2d> hull, std::size_t edge);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_GEOMETRY2D_HPP
