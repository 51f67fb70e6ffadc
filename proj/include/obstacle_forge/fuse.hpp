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

#ifndef OBSTACLE_FORGE_FUSE_HPP
#define OBSTACLE_FORGE_FUSE_HPP

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "obstacle_forge/cluster.hpp"
#include "obstacle_forge/core.hpp"
#include "obstacle_forge/ground.hpp"
#include "obstacle_forge/maskproc.hpp"
#include "obstacle_forge/track.hpp"

namespace obstacle_forge
{

/// Per cluster: 1 when at least `overlap_frac` of its in-view projected
/// points fall inside a single candidate mask. Projection point indices refer
/// to the clustered point array.
std::vector<std::uint8_t> mask_to_clusters(
  std::span<const ObstacleMask2D> masks, int width, int height, const ClusterSet & clusters,
  std::span<const Projection> projections, double overlap_frac = 0.5);

/// Merges tracks whose BEV centroids stay closer than `merge_dist` on every
/// common frame (at least one), repeated to a fixed point. The merged track
/// keeps the lowest id and the attributes of its highest-priority member.
std::vector<Track> resolve_entities(std::vector<Track> tracks, double merge_dist = 1.0);

struct CuboidFit
{
  Eigen::Vector3d center{Eigen::Vector3d::Zero()};
  double w{0.0};
  double h{0.0};
  double l{0.0};
  double theta{0.0};
  bool fallback{false};
};

/// Minimum-area BEV rectangle (rotating calipers) plus the z range.
CuboidFit fit_cuboid(std::span<const Eigen::Vector3d> points);

struct Kinematics
{
  Eigen::Vector2d velocity{Eigen::Vector2d::Zero()};
  Eigen::Vector2d acceleration{Eigen::Vector2d::Zero()};
};

/// Central differences over (possibly non-uniform) times, one-sided at the
/// ends. Acceleration needs 3 samples; end values copy their neighbour.
std::vector<Kinematics> estimate_kinematics(std::span<const double> times, std::span<const Eigen::Vector2d> xy);

/// Stationary tracks, one observation per frame the anomaly received points.
std::vector<Track> anomaly_tracks(
  std::span<const AnomalyCluster> anomalies, std::span<const double> frame_times, IdAllocator & ids);

/// One box per track per observed frame; the cuboid is fitted once on the
/// aggregate and re-posed into each frame through its alignment.
std::vector<Box3D> emit_boxes(std::span<const Track> tracks);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_FUSE_HPP
