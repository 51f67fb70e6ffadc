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

#include "obstacle_forge/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace obstacle_forge
{

namespace
{
constexpr std::size_t kLeafSize = 12;

bool closer(const KdTree::Neighbor & a, const KdTree::Neighbor & b)
{
  return a.squared_distance < b.squared_distance ||
         (a.squared_distance == b.squared_distance && a.index < b.index);
}
}  // namespace

KdTree::KdTree(std::span<const Eigen::Vector3d> points) : points_(points), order_(points.size())
{
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points.empty()) {
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    build(0, points.size());
  }
}

int KdTree::build(std::size_t begin, std::size_t end)
{
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi(axis) - lo(axis) <= 0.0) return id;  // all coincident: keep as leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(
    order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
    order_.begin() + static_cast<std::ptrdiff_t>(end), [this, axis](std::size_t a, std::size_t b) {
      return points_[a](axis) < points_[b](axis) || (points_[a](axis) == points_[b](axis) && a < b);
    });
  const double split = points_[order_[mid]](axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search_knn(int node_id, const Eigen::Vector3d & q, std::size_t k, std::vector<Neighbor> & heap) const
{
  const Node & node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const Neighbor cand{idx, (points_[idx] - q).squaredNorm()};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double diff = q(node.axis) - node.split;
  const int first = diff < 0.0 ? node.left : node.right;
  const int second = diff < 0.0 ? node.right : node.left;
  search_knn(first, q, k, heap);
  // <= keeps equal-distance candidates on the far side reachable for the
  // index tie-break.
  if (heap.size() < k || diff * diff <= heap.front().squared_distance) {
    search_knn(second, q, k, heap);
  }
}

KdTree::Neighbor KdTree::nearest(const Eigen::Vector3d & query) const
{
  const auto res = knn(query, 1);
  if (res.empty()) return {points_.size(), std::numeric_limits<double>::infinity()};
  return res.front();
}

std::vector<KdTree::Neighbor> KdTree::knn(const Eigen::Vector3d & query, std::size_t k) const
{
  std::vector<Neighbor> heap;
  if (nodes_.empty() || k == 0) return heap;
  heap.reserve(k + 1);
  search_knn(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

}  // namespace obstacle_forge
