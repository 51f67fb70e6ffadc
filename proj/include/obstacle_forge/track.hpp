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

#ifndef OBSTACLE_FORGE_TRACK_HPP
#define OBSTACLE_FORGE_TRACK_HPP

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "obstacle_forge/core.hpp"
#include "obstacle_forge/ground.hpp"
#include "obstacle_forge/register.hpp"

namespace obstacle_forge
{

enum class DetectionSource
{
  kInstance,
  kObstacleMask,
  kAnomaly,
};

const char * to_string(DetectionSource source);

/// Lower is preferred when entities are merged.
inline int priority(DetectionSource s) { return static_cast<int>(s); }

inline constexpr const char * kUnknownClass = "unknown";
inline constexpr const char * kObstacleClass = "obstacle";

/// One cluster of one frame, as handed to a tracker.
struct ClusterObservation
{
  std::vector<Eigen::Vector3d> points;  // world frame
  std::size_t projected{0};             // in-view projected points, all cameras
  std::map<std::string, std::size_t> class_votes;

  Eigen::Vector3d centroid() const;
};

struct Observation
{
  int frame_index{1};
  double timestamp{0.0};
  Eigen::Vector3d centroid{Eigen::Vector3d::Zero()};  // world frame
  std::vector<Eigen::Vector3d> points;                // world frame
  /// Maps this frame's world points into the aggregate's frame.
  RigidTransform alignment;
  /// Registration failed; `alignment` is the constant-velocity prediction.
  bool low_confidence{false};
  std::size_t projected{0};
  std::map<std::string, std::size_t> class_votes;
};

struct Track
{
  std::int64_t id{0};
  DetectionSource source{DetectionSource::kInstance};
  std::string class_label{kUnknownClass};
  std::vector<Observation> observations;  // strictly increasing frame_index
  std::vector<Eigen::Vector3d> aggregate;
  int misses{0};
  bool terminated{false};

  int first_frame() const { return observations.front().frame_index; }
  int last_frame() const { return observations.back().frame_index; }
  std::size_t lifetime() const { return observations.size(); }
  const Observation * at_frame(int frame_index) const;

  /// Planar velocity from the last `window` observations (zero with fewer than 2).
  Eigen::Vector2d velocity_estimate(std::size_t window = 10) const;
  /// Constant-velocity extrapolation of the last centroid.
  Eigen::Vector3d predict(double timestamp) const;
  /// Rebuilds `aggregate` from the observations and their alignments.
  void rebuild_aggregate();
};

struct Assignment
{
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (track slot, cluster index)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_clusters;
};

/// Greedy global-minimum matching on BEV distance, admitting pairs with
/// distance < gate. Ties resolve by (track id, cluster index).
Assignment associate(
  std::span<const Eigen::Vector3d> predicted, std::span<const std::int64_t> track_ids,
  std::span<const Eigen::Vector3d> clusters, double gate);

struct TrackerConfig
{
  double gate_m{2.0};
  int max_miss{3};
  /// Tracks slower than this merge on world poses alone.
  double static_speed_mps{0.5};
  GicpConfig gicp{.planar = true, .degeneracy_ratio = 1e-2};
};

/// Monotone id source shared by every tracker of a sequence.
class IdAllocator
{
public:
  explicit IdAllocator(std::int64_t first = 1) : next_(first) {}
  std::int64_t next() { return next_++; }

private:
  std::int64_t next_;
};

/// Sequential multi-object tracker for one detection source.
class Tracker
{
public:
  Tracker(DetectionSource source, const TrackerConfig & config, IdAllocator & ids);

  /// Associates, updates, spawns and terminates for one frame. `gate` is the
  /// association gate for this frame.
  void step(int frame_index, double timestamp, std::vector<ClusterObservation> clusters, double gate);

  const std::vector<Track> & active() const { return active_; }
  /// Every track ever created, ordered by id.
  std::vector<Track> finish();

private:
  void merge(Track & track, int frame_index, double timestamp, ClusterObservation && cluster);
  void spawn(int frame_index, double timestamp, ClusterObservation && cluster);

  DetectionSource source_;
  TrackerConfig config_;
  IdAllocator & ids_;
  std::vector<Track> active_;
  std::vector<Track> done_;
  int last_frame_{0};
};

/// Majority instance class over all observations; adopted when it carries at
/// least `min_fraction` of the projected points, else "unknown".
std::string classify_track(const Track & track, double min_fraction = 0.5);

struct CandidateFilter
{
  std::size_t min_lifetime{5};
  double max_extent_m{6.0};
  double road_margin_m{1.0};
};

bool is_closed_set(const std::string & label);

/// Keeps closed-set tracks; other tracks need lifetime >= min_lifetime, every
/// axis-aligned aggregate extent <= max_extent_m, and road cells near the
/// aggregate centroid.
std::vector<Track> filter_candidates(
  std::vector<Track> tracks, const CandidateFilter & filter, const RoadWorldModel & road);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_TRACK_HPP
