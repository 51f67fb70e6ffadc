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

#ifndef OBSTACLE_FORGE_CLUSTER_HPP
#define OBSTACLE_FORGE_CLUSTER_HPP

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace obstacle_forge
{

struct DbscanParams
{
  double eps{0.8};
  std::size_t min_pts{5};
};

struct ClusterSet
{
  static constexpr int kNoise = -1;

  std::vector<int> labels;         // per point: kNoise or 0..k-1
  std::vector<std::uint8_t> core;  // per point
  int k{0};

  /// Point indices per cluster, ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// DBSCAN with a uniform hash grid of cell size eps. Core points have at least
/// min_pts neighbours within distance <= eps, counting themselves. Points are
/// scanned in ascending index order and each cluster is expanded breadth
/// first, so a border point reachable from several clusters joins the one
/// created first.
ClusterSet dbscan(std::span<const Eigen::Vector3d> points, const DbscanParams & params = {});

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_CLUSTER_HPP
