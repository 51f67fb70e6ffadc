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

#ifndef OBSTACLE_FORGE_PIPELINE_HPP
#define OBSTACLE_FORGE_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obstacle_forge/cluster.hpp"
#include "obstacle_forge/dataset.hpp"
#include "obstacle_forge/eval.hpp"
#include "obstacle_forge/ground.hpp"
#include "obstacle_forge/maskproc.hpp"
#include "obstacle_forge/register.hpp"
#include "obstacle_forge/track.hpp"

namespace obstacle_forge
{

struct PipelineConfig
{
  DbscanParams dbscan;
  GicpConfig gicp{.planar = true, .degeneracy_ratio = 1e-2};
  GroundParams ground;
  double anomaly_cell_m{0.5};
  AnomalyParams anomaly;
  double gate_m{2.0};
  int max_miss{3};
  std::size_t min_lifetime{5};
  double static_speed_mps{0.5};
  double overlap_frac{0.5};
  double merge_dist_m{1.0};
  double max_extent_m{6.0};
  CandidateParams maskproc;

  /// Throws kValidation naming the key.
  void validate() const;
};

/// Nested JSON object; every key is optional and unknown keys are rejected.
PipelineConfig config_from_json(const std::string & text);
/// Defaults when `path` is empty.
PipelineConfig load_config(const std::filesystem::path & path);
std::string config_to_json(const PipelineConfig & config);

struct DetectReport
{
  int frames{0};
  std::size_t points{0};
  std::size_t ground_points{0};
  std::size_t clusters{0};
  std::size_t tagged_clusters{0};
  std::size_t candidates{0};
  std::size_t road_points{0};
  std::size_t tracks_instance{0};
  std::size_t tracks_obstacle_mask{0};
  std::size_t tracks_anomaly{0};
  std::size_t tracks_filtered{0};
  std::size_t tracks_resolved{0};
  std::size_t boxes{0};
  std::vector<std::pair<std::string, double>> timings_s;
};

/// Full detector: writes <out>/predictions/boxes.csv and <out>/report.json.
DetectReport run_detect(
  const std::filesystem::path & dataset, const PipelineConfig & config, const std::filesystem::path & out,
  unsigned threads);

/// Same as run_detect on an already loaded dataset, returning world boxes
/// without writing anything.
std::vector<Box3D> detect(const Dataset & dataset, const PipelineConfig & config, unsigned threads,
                          DetectReport * report = nullptr);

struct BaselineRow
{
  int frame_index{1};
  int camera_id{1};
  std::size_t candidate_idx{0};
  std::optional<DepthEstimate> estimate;
};

/// Naive depth per obstacle candidate of every camera frame, averaged over the
/// projected non-ground points.
std::vector<BaselineRow> baseline(const Dataset & dataset, const PipelineConfig & config, unsigned threads);
void save_baseline(std::span<const BaselineRow> rows, const std::filesystem::path & path);

/// Writes <out>/baseline.csv.
std::size_t run_baseline(
  const std::filesystem::path & dataset, const PipelineConfig & config, const std::filesystem::path & out,
  unsigned threads);

/// Evaluates `predictions` (default <out>/predictions/boxes.csv) against
/// <dataset>/gt/boxes.csv; writes <out>/eval/*.
EvalSummary run_eval(
  const std::filesystem::path & dataset, const std::filesystem::path & predictions,
  const std::filesystem::path & out);

/// Ego-frame evaluation of world boxes over a loaded dataset.
std::vector<FrameEvaluation> evaluate_world_boxes(
  const Dataset & dataset, std::span<const Box3D> gt, std::span<const Box3D> pred);

/// synthgen.generate from a scene JSON file.
SequenceManifest run_synth(const std::filesystem::path & scene, const std::filesystem::path & out);

/// Status code of an error kind: 1 usage, 2 data, 3 internal.
int status_of(ErrorKind kind);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_PIPELINE_HPP
