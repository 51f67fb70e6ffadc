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

#ifndef OBSTACLE_FORGE_KDTREE_HPP
#define OBSTACLE_FORGE_KDTREE_HPP

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace obstacle_forge
{

/// Static 3-d tree over a borrowed point array. Ties in distance resolve to
/// the lowest point index, so queries are deterministic.
class KdTree
{
public:
  explicit KdTree(std::span<const Eigen::Vector3d> points);

  struct Neighbor
  {
    std::size_t index;
    double squared_distance;
  };

  /// Nearest point; index == size() when the tree is empty.
  Neighbor nearest(const Eigen::Vector3d & query) const;

  /// k nearest, sorted by (distance, index).
  std::vector<Neighbor> knn(const Eigen::Vector3d & query, std::size_t k) const;

  std::size_t size() const { return points_.size(); }

private:
  struct Node
  {
    std::size_t begin, end;  // range in order_
    int axis;                // -1 for leaf
    double split;
    int left, right;
  };

  int build(std::size_t begin, std::size_t end);
  void search_knn(int node, const Eigen::Vector3d & q, std::size_t k, std::vector<Neighbor> & heap) const;

  std::span<const Eigen::Vector3d> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_KDTREE_HPP
