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

#include "obstacle_forge/cluster.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "obstacle_forge/errors.hpp"

namespace obstacle_forge
{

namespace
{

struct GridKey
{
  std::int64_t x, y, z;
  bool operator==(const GridKey &) const = default;
};

struct GridKeyHash
{
  std::size_t operator()(const GridKey & k) const noexcept
  {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xc2b2ae3d27d4eb4fULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667b19e3779f9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class HashGrid
{
public:
  HashGrid(std::span<const Eigen::Vector3d> points, double cell) : points_(points), cell_(cell)
  {
    for (std::size_t i = 0; i < points.size(); ++i) {
      buckets_[key(points[i])].push_back(i);
    }
  }

  // Neighbours within eps (inclusive), in ascending bucket-scan order.
  void query(std::size_t i, double eps, std::vector<std::size_t> & out) const
  {
    out.clear();
    const GridKey c = key(points_[i]);
    const double eps2 = eps * eps;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = buckets_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == buckets_.end()) continue;
          for (auto j : it->second) {
            if ((points_[j] - points_[i]).squaredNorm() <= eps2) out.push_back(j);
          }
        }
  }

private:
  GridKey key(const Eigen::Vector3d & p) const
  {
    return {
      static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_)),
      static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  std::span<const Eigen::Vector3d> points_;
  double cell_;
  std::unordered_map<GridKey, std::vector<std::size_t>, GridKeyHash> buckets_;
};

}  // namespace

std::vector<std::vector<std::size_t>> ClusterSet::members() const
{
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) out[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return out;
}

ClusterSet dbscan(std::span<const Eigen::Vector3d> points, const DbscanParams & params)
{
  if (!(params.eps > 0.0) || params.min_pts < 1) {
    fail(ErrorKind::kValidation, "dbscan: eps must be > 0 and min_pts >= 1");
  }
  const std::size_t n = points.size();
  ClusterSet result;
  result.labels.assign(n, ClusterSet::kNoise);
  result.core.assign(n, 0);
  if (n == 0) return result;

  const HashGrid grid(points, params.eps);
  // Neighbour counts first: core status is order independent.
  std::vector<std::size_t> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    grid.query(i, params.eps, scratch);
    result.core[i] = scratch.size() >= params.min_pts ? 1 : 0;
  }

  constexpr int kUnassigned = -2;
  std::vector<int> label(n, kUnassigned);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnassigned || !result.core[i]) continue;
    const int id = result.k++;
    label[i] = id;
    queue.assign(1, i);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t p = queue[head];
      if (!result.core[p]) continue;
      grid.query(p, params.eps, scratch);
      for (auto q : scratch) {
        if (label[q] != kUnassigned) continue;
        label[q] = id;
        queue.push_back(q);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.labels[i] = label[i] == kUnassigned ? ClusterSet::kNoise : label[i];
  }
  return result;
}

}  // namespace obstacle_forge
