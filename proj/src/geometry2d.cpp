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

#include "obstacle_forge/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace obstacle_forge
{

Polygon2 convex_hull(std::span<const Eigen::Vector2d> points)
{
  Polygon2 pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d & a, const Eigen::Vector2d & b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    return pts;
  }
  Polygon2 hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto & p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const auto & p = pts[i];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const Eigen::Vector2d> polygon)
{
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto & a = polygon[i];
    const auto & b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

std::optional<std::pair<double, double>> scanline_span(
  std::span<const Eigen::Vector2d> hull, double y, double tolerance)
{
  if (hull.empty()) return std::nullopt;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto & a = hull[i];
    const auto & b = hull[(i + 1) % n];
    const double ymin = std::min(a.y(), b.y());
    const double ymax = std::max(a.y(), b.y());
    if (y < ymin - tolerance || y > ymax + tolerance) continue;
    if (std::abs(b.y() - a.y()) <= tolerance) {
      lo = std::min({lo, a.x(), b.x()});
      hi = std::max({hi, a.x(), b.x()});
    } else {
      const double t = std::clamp((y - a.y()) / (b.y() - a.y()), 0.0, 1.0);
      const double x = a.x() + t * (b.x() - a.x());
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo - tolerance, hi + tolerance);
}

std::array<Eigen::Vector2d, 4> OrientedRect::corners() const
{
  const Eigen::Vector2d e(std::cos(theta), std::sin(theta));
  const Eigen::Vector2d n(-e.y(), e.x());
  const Eigen::Vector2d a = 0.5 * length * e;
  const Eigen::Vector2d b = 0.5 * width * n;
  return {center - a - b, center + a - b, center + a + b, center - a + b};
}

namespace
{

double canonical_theta(const Eigen::Vector2d & dir)
{
  double theta = std::atan2(dir.y(), dir.x());
  if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  if (theta > std::numbers::pi / 2) theta -= std::numbers::pi;
  return theta;
}

// Rectangle in the (e, n) frame with the given projections.
OrientedRect make_rect(
  const Eigen::Vector2d & e, double a_min, double a_max, double b_min, double b_max)
{
  const Eigen::Vector2d n(-e.y(), e.x());
  OrientedRect r;
  r.center = e * (0.5 * (a_min + a_max)) + n * (0.5 * (b_min + b_max));
  const double len_e = a_max - a_min;
  const double len_n = b_max - b_min;
  if (len_e >= len_n) {
    r.length = len_e;
    r.width = len_n;
    r.theta = canonical_theta(e);
  } else {
    r.length = len_n;
    r.width = len_e;
    r.theta = canonical_theta(n);
  }
  return r;
}

OrientedRect axis_aligned(std::span<const Eigen::Vector2d> points)
{
  OrientedRect r;
  r.degenerate = true;
  if (points.empty()) return r;
  Eigen::Vector2d lo = points.front();
  Eigen::Vector2d hi = points.front();
  for (const auto & p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  r.center = 0.5 * (lo + hi);
  const Eigen::Vector2d ext = hi - lo;
  // theta fixed at 0: length follows x, width follows y.
  r.length = ext.x();
  r.width = ext.y();
  r.theta = 0.0;
  return r;
}

}  // namespace

OrientedRect rect_for_edge(std::span<const Eigen::Vector2d> hull, std::size_t edge)
{
  const std::size_t m = hull.size();
  const Eigen::Vector2d e = (hull[(edge + 1) % m] - hull[edge]).normalized();
  const Eigen::Vector2d n(-e.y(), e.x());
  double a_min = std::numeric_limits<double>::infinity();
  double a_max = -a_min;
  double b_min = a_min;
  double b_max = -a_min;
  for (const auto & p : hull) {
    a_min = std::min(a_min, e.dot(p));
    a_max = std::max(a_max, e.dot(p));
    b_min = std::min(b_min, n.dot(p));
    b_max = std::max(b_max, n.dot(p));
  }
  return make_rect(e, a_min, a_max, b_min, b_max);
}

OrientedRect min_area_rect(std::span<const Eigen::Vector2d> points)
{
  const Polygon2 hull = convex_hull(points);
  const std::size_t m = hull.size();
  if (m < 3) {
    return axis_aligned(points);
  }
  auto next = [m](std::size_t i) { return (i + 1) % m; };

  // Calipers: far vertex along the inward normal, extreme vertices along the edge.
  Eigen::Vector2d e0 = (hull[1] - hull[0]).normalized();
  Eigen::Vector2d n0(-e0.y(), e0.x());
  std::size_t far = 0, hi = 0, lo = 0;
  for (std::size_t k = 1; k < m; ++k) {
    if (n0.dot(hull[k]) > n0.dot(hull[far])) far = k;
    if (e0.dot(hull[k]) > e0.dot(hull[hi])) hi = k;
    if (e0.dot(hull[k]) < e0.dot(hull[lo])) lo = k;
  }

  OrientedRect best;
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d e = (hull[next(i)] - hull[i]).normalized();
    const Eigen::Vector2d n(-e.y(), e.x());
    while (n.dot(hull[next(far)]) > n.dot(hull[far])) far = next(far);
    while (e.dot(hull[next(hi)]) > e.dot(hull[hi])) hi = next(hi);
    while (e.dot(hull[next(lo)]) < e.dot(hull[lo])) lo = next(lo);
    const double b0 = n.dot(hull[i]);
    const double area = (e.dot(hull[hi]) - e.dot(hull[lo])) * (n.dot(hull[far]) - b0);
    if (area < best_area) {
      best_area = area;
      best = make_rect(e, e.dot(hull[lo]), e.dot(hull[hi]), b0, n.dot(hull[far]));
    }
  }
  return best;
}

}  // namespace obstacle_forge
