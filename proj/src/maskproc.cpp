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

#include "obstacle_forge/maskproc.hpp"

#include <algorithm>
#include <cmath>

#include "obstacle_forge/geometry2d.hpp"

namespace obstacle_forge
{

bool ObstacleMask2D::contains(int u, int v) const
{
  if (u < u_min || u > u_max || v < v_min || v > v_max) return false;
  const auto idx = static_cast<std::uint32_t>(v * image_width + u);
  return std::binary_search(pixels.begin(), pixels.end(), idx);
}

std::vector<ObstacleMask2D> extract_obstacle_candidates(const LabelMask & road, const CandidateParams & params)
{
  const int width = road.width;
  const int height = road.height;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t max_area = params.max_area > 0 ? params.max_area : n / 4;

  auto road_components =
    connected_components(std::span<const std::uint16_t>(road.pixels), width, height, [](std::uint16_t l) {
      return l == 1;
    });
  if (road_components.empty()) {
    return {};
  }
  // Largest component; the first one found wins ties.
  std::size_t largest = 0;
  for (std::size_t i = 1; i < road_components.size(); ++i) {
    if (road_components[i].size() > road_components[largest].size()) largest = i;
  }
  const auto & component = road_components[largest];

  // 0 outside hull, 1 road (largest component), 2 hull minus road.
  std::vector<std::uint16_t> region(n, 0);
  for (auto idx : component) region[idx] = 1;

  // Hull over boundary pixel centres (interior pixels cannot be hull vertices).
  std::vector<Eigen::Vector2d> boundary;
  for (auto idx : component) {
    const int u = static_cast<int>(idx % width);
    const int v = static_cast<int>(idx / width);
    const bool edge = u == 0 || v == 0 || u == width - 1 || v == height - 1 || region[idx - 1] != 1 ||
                      region[idx + 1] != 1 || region[idx - width] != 1 || region[idx + width] != 1;
    if (edge) boundary.emplace_back(u, v);
  }
  const Polygon2 hull = convex_hull(boundary);

  if (hull.size() >= 3) {
    int v_lo = height;
    int v_hi = -1;
    for (const auto & p : hull) {
      v_lo = std::min(v_lo, static_cast<int>(p.y()));
      v_hi = std::max(v_hi, static_cast<int>(p.y()));
    }
    for (int v = v_lo; v <= v_hi; ++v) {
      const auto span = scanline_span(hull, static_cast<double>(v));
      if (!span) continue;
      const int u0 = std::max(0, static_cast<int>(std::ceil(span->first)));
      const int u1 = std::min(width - 1, static_cast<int>(std::floor(span->second)));
      for (int u = u0; u <= u1; ++u) {
        auto & cell = region[static_cast<std::size_t>(v) * width + u];
        if (cell != 1) cell = 2;
      }
    }
  }

  const auto holes = connected_components(
    std::span<const std::uint16_t>(region), width, height, [](std::uint16_t l) { return l == 2; });
  std::vector<ObstacleMask2D> out;
  for (const auto & comp : holes) {
    if (comp.size() < params.min_area || comp.size() > max_area) continue;
    ObstacleMask2D m;
    m.camera_id = road.camera_id;
    m.frame_index = road.frame_index;
    m.image_width = width;
    m.u_min = width;
    m.v_min = height;
    m.u_max = -1;
    m.v_max = -1;
    bool touches_excluded_border = false;
    for (auto idx : comp) {
      const int u = static_cast<int>(idx % width);
      const int v = static_cast<int>(idx / width);
      m.u_min = std::min(m.u_min, u);
      m.u_max = std::max(m.u_max, u);
      m.v_min = std::min(m.v_min, v);
      m.v_max = std::max(m.v_max, v);
      if (u == 0 || u == width - 1 || v == height - 1) touches_excluded_border = true;
    }
    if (touches_excluded_border) continue;
    m.pixels = comp;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::uint16_t> candidate_label_image(std::span<const ObstacleMask2D> candidates, int width, int height)
{
  std::vector<std::uint16_t> image(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    for (auto idx : candidates[k].pixels) image[idx] = static_cast<std::uint16_t>(k + 1);
  }
  return image;
}

std::optional<DepthEstimate> naive_depth(const ObstacleMask2D & mask, std::span<const Projection> projected)
{
  std::vector<double> depths;
  for (const auto & p : projected) {
    if (mask.contains(p.pixel_u(), p.pixel_v())) depths.push_back(p.depth);
  }
  if (depths.empty()) return std::nullopt;
  // Summed in sorted order so the result is bit-identical under permutation.
  std::sort(depths.begin(), depths.end());
  double sum = 0.0;
  for (double d : depths) sum += d;
  return DepthEstimate{sum / static_cast<double>(depths.size()), depths.size()};
}

}  // namespace obstacle_forge
