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

#ifndef OBSTACLE_FORGE_EVAL_HPP
#define OBSTACLE_FORGE_EVAL_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obstacle_forge/core.hpp"

namespace obstacle_forge
{

/// BEV grid in the ego frame: row r covers x in [10r, 10r + 10), column c
/// covers y in [-12 + 4c, -8 + 4c).
struct HeatmapGrid
{
  static constexpr int kRows = 10;
  static constexpr int kCols = 6;
  static constexpr double kRowMeters = 10.0;
  static constexpr double kColMeters = 4.0;
  static constexpr double kLateralMin = -12.0;

  std::array<std::optional<double>, kRows * kCols> values{};

  std::optional<double> & at(int row, int col) { return values[static_cast<std::size_t>(row * kCols + col)]; }
  const std::optional<double> & at(int row, int col) const
  {
    return values[static_cast<std::size_t>(row * kCols + col)];
  }
  static std::optional<std::pair<int, int>> cell_of(double x, double y);
  bool operator==(const HeatmapGrid & other) const = default;
};

struct MatchResult
{
  std::vector<std::pair<std::size_t, std::size_t>> tp;  // (gt index, pred index)
  std::vector<std::size_t> fp;
  std::vector<std::size_t> fn;
};

inline constexpr double kMatchDistance = 1.0;

/// Greedy one-to-one matching by ascending BEV centre distance, admitting
/// pairs closer than `threshold`; ties by (gt id, pred id).
MatchResult match_frame(std::span<const Box3D> gt, std::span<const Box3D> pred, double threshold = kMatchDistance);

/// Boxes of one frame in the ego frame, with their matching.
struct FrameEvaluation
{
  int frame_index{1};
  std::vector<Box3D> gt;
  std::vector<Box3D> pred;
  MatchResult match;
};

/// Groups ego-frame boxes by frame and matches each frame.
std::vector<FrameEvaluation> evaluate_frames(
  std::span<const Box3D> gt, std::span<const Box3D> pred, double threshold = kMatchDistance);

HeatmapGrid precision_heatmap(std::span<const FrameEvaluation> frames);
HeatmapGrid recall_heatmap(std::span<const FrameEvaluation> frames);
/// (longitudinal, lateral) mean absolute displacement over TPs, GT-binned.
std::pair<HeatmapGrid, HeatmapGrid> displacement_heatmaps(std::span<const FrameEvaluation> frames);
/// (length, width, height) mean absolute extent error over TPs, GT-binned.
std::array<HeatmapGrid, 3> extent_heatmaps(std::span<const FrameEvaluation> frames);
/// Matched-prediction id switches per GT track, binned at the GT position.
HeatmapGrid track_id_change_heatmap(std::span<const FrameEvaluation> frames);

struct EvalSummary
{
  std::size_t tp{0};  // GT-binned
  std::size_t fp{0};
  std::size_t fn{0};
  std::size_t tp_pred{0};  // prediction-binned
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> mean_long_disp;
  std::optional<double> mean_lat_disp;
  std::optional<double> mean_len_err;
  std::optional<double> mean_wid_err;
  std::optional<double> mean_hei_err;
  std::size_t id_changes{0};
};

/// Totals over grid cells whose rows lie within `max_forward` meters.
EvalSummary summarize(std::span<const FrameEvaluation> frames, double max_forward = 100.0);

/// CSV (row-major, 6 decimals, `none` for empty cells) and 8-bit P5 graymap
/// scaled min -> 0, max -> 255; empty cells and a degenerate range map to 0.
void write_heatmap(const HeatmapGrid & grid, const std::filesystem::path & csv_path,
                   const std::filesystem::path & pgm_path);
std::string heatmap_csv(const HeatmapGrid & grid);
std::vector<std::uint8_t> heatmap_pixels(const HeatmapGrid & grid);

void write_summary(const EvalSummary & summary, const std::filesystem::path & path);

/// Re-expresses world-frame boxes in the ego frame; ego_from_world[i - 1]
/// applies to frame i.
std::vector<Box3D> to_ego_frame(std::span<const Box3D> world_boxes, const std::vector<RigidTransform> & ego_from_world);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_EVAL_HPP
