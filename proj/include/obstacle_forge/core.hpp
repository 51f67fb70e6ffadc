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

#ifndef OBSTACLE_FORGE_CORE_HPP
#define OBSTACLE_FORGE_CORE_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "obstacle_forge/errors.hpp"

// Frames: ego / world are x-forward, y-left, z-up. Camera frame is z-forward,
// x-right, y-down.

namespace obstacle_forge
{

struct Point
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double intensity{0.0};  // [0, 1]
  double timestamp{0.0};  // seconds

  Eigen::Vector3d position() const { return {x, y, z}; }
};

struct PointCloud
{
  int frame_index{1};
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

class RigidTransform
{
public:
  RigidTransform() = default;
  RigidTransform(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation)
  : rotation_(rotation), translation_(translation)
  {
  }

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Eigen::Vector3d & t)
  {
    return {Eigen::Matrix3d::Identity(), t};
  }
  /// Rotation about +z by `yaw` radians followed by translation `t`.
  static RigidTransform from_yaw(double yaw, const Eigen::Vector3d & t = Eigen::Vector3d::Zero());

  const Eigen::Matrix3d & rotation() const { return rotation_; }
  const Eigen::Vector3d & translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d & p) const { return rotation_ * p + translation_; }
  Eigen::Vector3d operator*(const Eigen::Vector3d & p) const { return apply(p); }

  RigidTransform inverse() const;

  /// Yaw of the rotated x axis, in (-pi, pi].
  double yaw() const;

  /// Orthonormal with det +1 within `tolerance`.
  bool is_valid(double tolerance = 1e-9) const;

  Eigen::Matrix4d matrix() const;
  static RigidTransform from_matrix(const Eigen::Matrix4d & m);

private:
  Eigen::Matrix3d rotation_{Eigen::Matrix3d::Identity()};
  Eigen::Vector3d translation_{Eigen::Vector3d::Zero()};
};

/// Result applies `b` first, then `a`.
RigidTransform compose(const RigidTransform & a, const RigidTransform & b);
inline RigidTransform operator*(const RigidTransform & a, const RigidTransform & b)
{
  return compose(a, b);
}
inline RigidTransform inverse(const RigidTransform & t) { return t.inverse(); }

/// Projects a near-orthonormal matrix onto SO(3).
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d & r);

/// Wraps to (-pi, pi].
double normalize_angle(double angle);

struct StampedPose
{
  double timestamp{0.0};
  RigidTransform world_from_ego;
};

/// Linear translation + slerp rotation between the bracketing samples.
/// Throws kOutOfRange outside [front, back] timestamps.
RigidTransform interpolate_pose(std::span<const StampedPose> poses, double t);

/// Maps every point lidar -> ego -> world at its own timestamp, then world ->
/// ego at `target_time`.
PointCloud motion_compensate(
  const PointCloud & cloud, std::span<const StampedPose> poses,
  const RigidTransform & ego_from_lidar, double target_time);

struct CameraCalibration
{
  int camera_id{1};
  double fx{1.0};
  double fy{1.0};
  double cx{0.0};
  double cy{0.0};
  int width{1};
  int height{1};
  RigidTransform camera_from_ego;

  /// Throws kValidation naming the offending field.
  void validate() const;
};

struct CameraFrame
{
  int camera_id{1};
  int frame_index{1};
  double timestamp{0.0};
  std::string image_ref;
};

struct Projection
{
  std::size_t point_index{0};
  double u{0.0};
  double v{0.0};
  double depth{0.0};

  int pixel_u() const { return static_cast<int>(u); }
  int pixel_v() const { return static_cast<int>(v); }
};

/// Pinhole projection of ego-frame points; keeps Z > 0 and in-image entries.
std::vector<Projection> project(std::span<const Eigen::Vector3d> points_ego, const CameraCalibration & calib);
std::vector<Projection> project(const PointCloud & cloud_ego, const CameraCalibration & calib);

/// Inverse of the pinhole model; returns the camera-frame point.
Eigen::Vector3d backproject(double u, double v, double depth, const CameraCalibration & calib);

struct Box3D
{
  int frame_index{1};
  std::int64_t id{0};
  std::string label{"obstacle"};
  double x{0.0};
  double y{0.0};
  double z{0.0};
  double w{1.0};
  double h{1.0};
  double l{1.0};
  double theta{0.0};
  Eigen::Vector2d velocity{Eigen::Vector2d::Zero()};
  Eigen::Vector2d acceleration{Eigen::Vector2d::Zero()};

  Eigen::Vector3d center() const { return {x, y, z}; }
  void validate() const;
  bool operator==(const Box3D & other) const;
};

std::vector<Eigen::Vector3d> positions(const PointCloud & cloud);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_CORE_HPP
