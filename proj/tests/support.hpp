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

#ifndef OBSTACLE_FORGE_TESTS_SUPPORT_HPP
#define OBSTACLE_FORGE_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "obstacle_forge/cluster.hpp"
#include "obstacle_forge/ground.hpp"

namespace of_test
{

namespace fs = std::filesystem;

inline fs::path scratch_dir(const std::string & name)
{
  const fs::path p = fs::temp_directory_path() / ("obstacle_forge_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline double uniform(std::mt19937_64 & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Eigen::Matrix3d rotation_about(const Eigen::Vector3d & axis, double angle)
{
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

inline Eigen::Vector3d random_unit(std::mt19937_64 & rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d v(n(rng), n(rng), n(rng));
  return v.normalized();
}

// O(n^2) DBSCAN: cores by counting, clusters as components of the core graph
// numbered by their smallest core index, borders to the lowest such cluster.
struct BruteDbscan
{
  std::vector<int> labels;
  std::vector<std::uint8_t> core;
};

inline BruteDbscan brute_dbscan(std::span<const Eigen::Vector3d> pts, double eps, std::size_t min_pts)
{
  const std::size_t n = pts.size();
  BruteDbscan out;
  out.core.assign(n, 0);
  out.labels.assign(n, -1);
  auto near = [&](std::size_t i, std::size_t j) { return (pts[i] - pts[j]).norm() <= eps; };
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) c += near(i, j) ? 1 : 0;
    out.core[i] = c >= min_pts ? 1 : 0;
  }
  std::vector<std::size_t> comp(n);
  std::iota(comp.begin(), comp.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (comp[x] != x) x = comp[x];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!out.core[i] || !out.core[j] || !near(i, j)) continue;
      const std::size_t a = find(i);
      const std::size_t b = find(j);
      if (a != b) comp[std::max(a, b)] = std::min(a, b);
    }
  }
  // Roots are the smallest core index of their component.
  for (std::size_t i = 0; i < n; ++i) {
    if (out.core[i]) out.labels[i] = static_cast<int>(find(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.core[i]) continue;
    int best = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (out.core[j] && near(i, j) && (best < 0 || out.labels[j] < best)) best = out.labels[j];
    }
    out.labels[i] = best;
  }
  return out;
}

// True when `a` and `b` agree up to a bijective renaming of non-negative ids,
// with -1 fixed.
inline bool same_partition(std::span<const int> a, std::span<const int> b)
{
  if (a.size() != b.size()) return false;
  std::map<int, int> ab;
  std::map<int, int> ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it, fresh] = ab.emplace(a[i], b[i]);
    if (!fresh && it->second != b[i]) return false;
    auto [jt, fresh2] = ba.emplace(b[i], a[i]);
    if (!fresh2 && jt->second != a[i]) return false;
  }
  return true;
}

// Bounding-rectangle areas for the direction of every supporting line
// through two input points (the hull edges), found without a hull.
struct CaliperCandidate
{
  double angle;  // edge direction modulo pi/2
  double area;
};

inline std::vector<CaliperCandidate> brute_rect_candidates(std::span<const Eigen::Vector2d> pts)
{
  std::vector<CaliperCandidate> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::Vector2d d = pts[j] - pts[i];
      if (d.norm() < 1e-12) continue;
      bool left = true;
      for (std::size_t k = 0; k < n && left; ++k) {
        left = d.x() * (pts[k].y() - pts[i].y()) - d.y() * (pts[k].x() - pts[i].x()) >= -1e-12;
      }
      if (!left) continue;
      const Eigen::Vector2d u = d.normalized();
      const Eigen::Vector2d v(-u.y(), u.x());
      double a0 = INFINITY, a1 = -INFINITY, b0 = INFINITY, b1 = -INFINITY;
      for (const auto & p : pts) {
        a0 = std::min(a0, u.dot(p));
        a1 = std::max(a1, u.dot(p));
        b0 = std::min(b0, v.dot(p));
        b1 = std::max(b1, v.dot(p));
      }
      const double quarter = 0.5 * 3.14159265358979323846;
      out.push_back({std::fmod(std::atan2(u.y(), u.x()) + 4.0 * quarter, quarter), (a1 - a0) * (b1 - b0)});
    }
  }
  return out;
}

inline double brute_min_rect_area(std::span<const Eigen::Vector2d> pts)
{
  double best = INFINITY;
  for (const auto & c : brute_rect_candidates(pts)) best = std::min(best, c.area);
  return best;
}

// True when another orientation reaches the minimum area within `rel`.
inline bool min_rect_is_tied(std::span<const Eigen::Vector2d> pts, double rel = 1e-9)
{
  const auto cands = brute_rect_candidates(pts);
  const auto best = std::min_element(cands.begin(), cands.end(), [](auto & a, auto & b) { return a.area < b.area; });
  const double quarter = 0.5 * 3.14159265358979323846;
  for (const auto & c : cands) {
    double da = std::abs(c.angle - best->angle);
    da = std::min(da, quarter - da);
    if (da > 1e-6 && c.area <= best->area * (1.0 + rel)) return true;
  }
  return false;
}

inline double quadratic_road(double x, double y) { return 0.3 + 0.01 * x - 0.02 * y + 0.001 * x * x + 0.002 * x * y - 0.003 * y * y; }

// Road points on a regular lattice of `per_side`^2 samples per cell.
inline obstacle_forge::RoadWorldModel lattice_road(
  double x0, double x1, double y0, double y1, double cell, int per_side, double (*height)(double, double, const void *),
  const void * ctx)
{
  obstacle_forge::RoadWorldModel m(cell);
  const double step = cell / per_side;
  for (double x = x0 + 0.5 * step; x < x1; x += step) {
    for (double y = y0 + 0.5 * step; y < y1; y += step) m.add_point({x, y, height(x, y, ctx)}, 1);
  }
  return m;
}

}  // namespace of_test

#endif  // OBSTACLE_FORGE_TESTS_SUPPORT_HPP
