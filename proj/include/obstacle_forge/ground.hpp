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

#ifndef OBSTACLE_FORGE_GROUND_HPP
#define OBSTACLE_FORGE_GROUND_HPP

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "obstacle_forge/core.hpp"

namespace obstacle_forge
{

struct GroundParams
{
  double tile_m{5.0};
  double inlier_m{0.20};
  double max_tilt_deg{15.0};
  int ransac_iterations{60};
};

struct GroundSplit
{
  std::vector<std::size_t> ground_indices;     // ascending
  std::vector<std::size_t> nonground_indices;  // ascending
};

/// Tiled RANSAC plane fit. A tile with fewer than 3 points, or without a
/// plane inside the tilt limit, is entirely non-ground.
GroundSplit segment_ground(std::span<const Eigen::Vector3d> points_ego, const GroundParams & params = {});
GroundSplit segment_ground(const PointCloud & cloud_ego, const GroundParams & params = {});

using CellKey = std::pair<int, int>;

struct RoadCell
{
  std::vector<Eigen::Vector3d> points;  // world frame
  std::vector<int> frames;              // ascending, unique
  std::size_t count() const { return points.size(); }
};

/// World-frame grid of accumulated road (ground) points.
class RoadWorldModel
{
public:
  explicit RoadWorldModel(double cell_m = 0.5) : cell_m_(cell_m) {}

  double cell_size() const { return cell_m_; }
  CellKey key_of(double x, double y) const;
  Eigen::Vector2d cell_center(const CellKey & key) const;

  /// Adds every point whose `in_road` flag is set.
  void accumulate(std::span<const Eigen::Vector3d> world_points, std::span<const std::uint8_t> in_road, int frame_index);
  void add_point(const Eigen::Vector3d & p, int frame_index);

  const std::map<CellKey, RoadCell> & cells() const { return cells_; }
  const RoadCell * find(const CellKey & key) const;
  std::size_t cell_count(const CellKey & key) const;

  /// Any occupied cell whose centre lies within `radius` of (x, y).
  bool occupied_near(double x, double y, double radius) const;

  std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>> bounds() const;

private:
  double cell_m_;
  std::map<CellKey, RoadCell> cells_;
};

struct AnomalyParams
{
  double residual_threshold{0.15};
  std::size_t min_cells{2};
};

struct AnomalyCluster
{
  std::vector<CellKey> cells;  // ascending
  std::vector<Eigen::Vector3d> points;
  std::vector<int> frames;  // ascending, unique
  Eigen::Vector3d centroid{Eigen::Vector3d::Zero()};
};

struct SurfaceFit
{
  /// z = c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2, x/y relative to `origin`.
  Eigen::Matrix<double, 6, 1> coefficients{Eigen::Matrix<double, 6, 1>::Zero()};
  Eigen::Vector2d origin{Eigen::Vector2d::Zero()};

  double evaluate(double x, double y) const;
};

/// Least-squares quadratic surface; nullopt when underdetermined.
std::optional<SurfaceFit> fit_quadratic_surface(std::span<const Eigen::Vector3d> points, const Eigen::Vector2d & origin);

/// Mean |residual| of every scored cell (cells with an underdetermined fit
/// are absent). The surface starts from the 5x5 ring around the cell and is
/// refitted on the neighbourhood points within `inlier_band` of it until the
/// inlier set settles; a band of 0 keeps the ring fit.
std::map<CellKey, double> cell_residuals(const RoadWorldModel & model, double inlier_band = 0.075);

/// 4-connected components of cells whose mean |residual| exceeds the
/// threshold, keeping components of at least `min_cells` cells.
std::vector<AnomalyCluster> detect_anomalies(const RoadWorldModel & model, const AnomalyParams & params = {});

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_GROUND_HPP
