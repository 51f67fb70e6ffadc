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

#ifndef OBSTACLE_FORGE_MASKPROC_HPP
#define OBSTACLE_FORGE_MASKPROC_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "obstacle_forge/core.hpp"
#include "obstacle_forge/dataset.hpp"

namespace obstacle_forge
{

/// One 4-connected obstacle candidate in image space.
struct ObstacleMask2D
{
  int camera_id{1};
  int frame_index{1};
  int image_width{0};
  std::vector<std::uint32_t> pixels;  // linear indices v * width + u, ascending
  int u_min{0};
  int v_min{0};
  int u_max{0};
  int v_max{0};

  std::size_t area() const { return pixels.size(); }
  bool contains(int u, int v) const;
};

struct CandidateParams
{
  std::size_t min_area{9};
  /// 0 means 0.25 * width * height.
  std::size_t max_area{0};
};

/// 4-connected components of pixels where `select(label)` holds; each
/// component is a sorted list of linear indices, components ordered by their
/// first pixel in row-major scan.
template <typename Pred>
std::vector<std::vector<std::uint32_t>> connected_components(
  std::span<const std::uint16_t> labels, int width, int height, Pred select);

/// Obstacle candidates = components of (filled convex hull of the largest
/// road component) minus the road, not touching the left/right/bottom border.
std::vector<ObstacleMask2D> extract_obstacle_candidates(const LabelMask & road, const CandidateParams & params = {});

/// Label image (0 = none, k + 1 = candidate k) for fast point lookup.
std::vector<std::uint16_t> candidate_label_image(std::span<const ObstacleMask2D> candidates, int width, int height);

struct DepthEstimate
{
  double depth{0.0};
  std::size_t support{0};
};

/// Mean depth of projected points falling inside the mask; nullopt without
/// support.
std::optional<DepthEstimate> naive_depth(const ObstacleMask2D & mask, std::span<const Projection> projected);

// ---------------------------------------------------------------------------

template <typename Pred>
std::vector<std::vector<std::uint32_t>> connected_components(
  std::span<const std::uint16_t> labels, int width, int height, Pred select)
{
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::vector<std::uint32_t>> components;
  std::vector<std::uint32_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] || !select(labels[start])) continue;
    std::vector<std::uint32_t> comp;
    seen[start] = 1;
    stack.push_back(static_cast<std::uint32_t>(start));
    while (!stack.empty()) {
      const std::uint32_t idx = stack.back();
      stack.pop_back();
      comp.push_back(idx);
      const int u = static_cast<int>(idx % static_cast<std::uint32_t>(width));
      const int v = static_cast<int>(idx / static_cast<std::uint32_t>(width));
      const int du[4] = {1, -1, 0, 0};
      const int dv[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nu = u + du[k];
        const int nv = v + dv[k];
        if (nu < 0 || nv < 0 || nu >= width || nv >= height) continue;
        const std::size_t nidx = static_cast<std::size_t>(nv) * width + nu;
        if (seen[nidx] || !select(labels[nidx])) continue;
        seen[nidx] = 1;
        stack.push_back(static_cast<std::uint32_t>(nidx));
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_MASKPROC_HPP
