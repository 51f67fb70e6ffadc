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

#ifndef OBSTACLE_FORGE_SYNTHGEN_HPP
#define OBSTACLE_FORGE_SYNTHGEN_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "obstacle_forge/core.hpp"
#include "obstacle_forge/dataset.hpp"

namespace obstacle_forge
{

struct ObstacleSpec
{
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};  // world centre at t = 0
  Eigen::Vector3d extent{1.0, 1.0, 1.0};              // w, h, l (l along yaw)
  double yaw{0.0};
  double reflectivity{1.0};
  std::string label{"obstacle"};  // anything else is a closed-set class
  Eigen::Vector2d velocity{Eigen::Vector2d::Zero()};

  bool closed_set() const { return label != "obstacle"; }
};

/// Square plateau of `height` with a quadratic ramp of width `ramp` around it.
/// Negative heights make holes.
struct BumpSpec
{
  Eigen::Vector2d center{Eigen::Vector2d::Zero()};
  double half_size{0.75};
  double ramp{0.25};
  double height{0.3};

  double height_at(double x, double y) const;
  double reach() const { return half_size + ramp; }
};

struct CameraSpec
{
  int width{640};
  int height{360};
  double fx{400.0};
  double fy{400.0};
  double cx{320.0};
  double cy{180.0};
  Eigen::Vector3d mount{0.0, 0.0, 2.0};  // ego frame
  double pitch_deg{5.0};                 // positive looks down
};

struct SceneSpec
{
  std::uint64_t seed{1};
  double duration{15.0};
  double lidar_rate{10.0};
  double ego_speed{5.0};
  double road_width{8.0};
  int beam_count{64};
  double noise_sigma{0.02};
  double max_range{100.0};
  double lidar_height{1.8};
  double min_elevation_deg{-24.8};
  double max_elevation_deg{2.0};
  double azimuth_step_deg{0.2};
  double azimuth_fov_deg{360.0};  // centred on ego +x
  std::vector<CameraSpec> cameras{CameraSpec{}};
  std::vector<ObstacleSpec> obstacles;
  std::vector<BumpSpec> bumps;

  int frame_count() const;
  double frame_period() const { return 1.0 / lidar_rate; }
  /// Reference time of 1-based frame i: the middle of its sweep.
  double frame_time(int frame_index) const;
  /// Throws kValidation naming the field.
  void validate() const;
};

SceneSpec scene_from_json(const std::string & text);
SceneSpec load_scene(const std::filesystem::path & path);
std::string scene_to_json(const SceneSpec & spec);

/// Ground height (flat road plus bumps).
double surface_height(const SceneSpec & spec, double x, double y);

RigidTransform ego_pose(const SceneSpec & spec, double t);
RigidTransform ego_from_lidar(const SceneSpec & spec);
CameraCalibration camera_calibration(const SceneSpec & spec, std::size_t camera_index);

/// World pose of obstacle k at time t (centre + yaw).
RigidTransform obstacle_pose(const ObstacleSpec & obstacle, double t);

inline constexpr int kHitGround = -1;

struct SimulatedFrame
{
  PointCloud cloud;              // lidar frame, full double precision
  std::vector<int> hit;          // per point: kHitGround or obstacle index
  std::vector<Eigen::Vector3d> ideal_world;  // noise-free intersection
};

/// Ray-cast one LiDAR sweep.
SimulatedFrame simulate_lidar(const SceneSpec & spec, int frame_index);

struct RenderedMasks
{
  LabelMask road;
  LabelMask obstacle_candidate;  // obstacle index + 1
  LabelMask instance;            // obstacle index + 1, closed-set classes only
};

RenderedMasks render_masks(const SceneSpec & spec, std::size_t camera_index, int frame_index);

/// Ground-truth boxes (world frame) for every frame where the obstacle lies
/// within max_range of the ego. Ids are obstacle index + 1.
std::vector<Box3D> ground_truth_boxes(const SceneSpec & spec);

/// Writes a complete dataset. Deterministic for a fixed spec.
SequenceManifest generate(const SceneSpec & spec, const std::filesystem::path & out);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_SYNTHGEN_HPP
