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

#include "obstacle_forge/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace obstacle_forge
{

const char * to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::kNotFound:
      return "not found";
    case ErrorKind::kParse:
      return "parse error";
    case ErrorKind::kValidation:
      return "validation error";
    case ErrorKind::kOutOfRange:
      return "out of range";
    case ErrorKind::kIo:
      return "I/O error";
    case ErrorKind::kUsage:
      return "usage error";
    case ErrorKind::kInternal:
      return "internal error";
  }
  return "error";
}

RigidTransform RigidTransform::from_yaw(double yaw, const Eigen::Vector3d & t)
{
  return {Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix(), t};
}

RigidTransform RigidTransform::inverse() const
{
  const Eigen::Matrix3d rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

double RigidTransform::yaw() const
{
  return normalize_angle(std::atan2(rotation_(1, 0), rotation_(0, 0)));
}

bool RigidTransform::is_valid(double tolerance) const
{
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    return false;
  }
  const double ortho = (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tolerance && std::abs(rotation_.determinant() - 1.0) <= tolerance;
}

Eigen::Matrix4d RigidTransform::matrix() const
{
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d & m)
{
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

RigidTransform compose(const RigidTransform & a, const RigidTransform & b)
{
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation()};
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d & r)
{
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d & v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) = -u.col(2);
  }
  return u * v.transpose();
}

double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

RigidTransform interpolate_pose(std::span<const StampedPose> poses, double t)
{
  if (poses.empty() || !(t >= poses.front().timestamp) || !(t <= poses.back().timestamp)) {
    std::ostringstream msg;
    msg << "pose query at t=" << t << " outside the pose span";
    if (!poses.empty()) {
      msg << " [" << poses.front().timestamp << ", " << poses.back().timestamp << "]";
    }
    fail(ErrorKind::kOutOfRange, msg.str());
  }
  const auto upper = std::upper_bound(
    poses.begin(), poses.end(), t, [](double value, const StampedPose & p) { return value < p.timestamp; });
  const auto & lo = *(upper - 1);
  if (lo.timestamp == t || upper == poses.end()) {
    return lo.world_from_ego;
  }
  const auto & hi = *upper;
  const double alpha = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  const Eigen::Vector3d translation =
    (1.0 - alpha) * lo.world_from_ego.translation() + alpha * hi.world_from_ego.translation();
  const Eigen::Quaterniond q0(lo.world_from_ego.rotation());
  const Eigen::Quaterniond q1(hi.world_from_ego.rotation());
  const Eigen::Quaterniond q = q0.slerp(alpha, q1).normalized();
  return {q.toRotationMatrix(), translation};
}

PointCloud motion_compensate(
  const PointCloud & cloud, std::span<const StampedPose> poses,
  const RigidTransform & ego_from_lidar, double target_time)
{
  PointCloud out;
  out.frame_index = cloud.frame_index;
  out.points.reserve(cloud.points.size());
  const RigidTransform target_from_world = interpolate_pose(poses, target_time).inverse();

  // Points of one sweep share few distinct timestamps per firing; cache the
  // last chain to avoid recomputing the interpolation for every point.
  double cached_time = std::numeric_limits<double>::quiet_NaN();
  RigidTransform chain;
  for (const auto & p : cloud.points) {
    if (!(p.timestamp == cached_time)) {
      chain = target_from_world * interpolate_pose(poses, p.timestamp) * ego_from_lidar;
      cached_time = p.timestamp;
    }
    const Eigen::Vector3d q = chain * p.position();
    out.points.push_back({q.x(), q.y(), q.z(), p.intensity, p.timestamp});
  }
  return out;
}

void CameraCalibration::validate() const
{
  auto bad = [this](const std::string & field) {
    fail(ErrorKind::kValidation, "camera " + std::to_string(camera_id) + ": invalid " + field);
  };
  if (camera_id < 1) bad("camera_id");
  if (!(fx > 0.0)) bad("fx");
  if (!(fy > 0.0)) bad("fy");
  if (width < 1) bad("width");
  if (height < 1) bad("height");
  if (!(cx >= 0.0 && cx < width)) bad("cx");
  if (!(cy >= 0.0 && cy < height)) bad("cy");
  if (!camera_from_ego.is_valid(1e-6)) bad("extrinsic");
}

std::vector<Projection> project(std::span<const Eigen::Vector3d> points_ego, const CameraCalibration & calib)
{
  std::vector<Projection> out;
  for (std::size_t i = 0; i < points_ego.size(); ++i) {
    const Eigen::Vector3d c = calib.camera_from_ego * points_ego[i];
    if (!(c.z() > 0.0)) {
      continue;
    }
    const double u = calib.fx * c.x() / c.z() + calib.cx;
    const double v = calib.fy * c.y() / c.z() + calib.cy;
    if (u >= 0.0 && u < calib.width && v >= 0.0 && v < calib.height) {
      out.push_back({i, u, v, c.z()});
    }
  }
  return out;
}

std::vector<Projection> project(const PointCloud & cloud_ego, const CameraCalibration & calib)
{
  const auto pts = positions(cloud_ego);
  return project(std::span<const Eigen::Vector3d>(pts), calib);
}

Eigen::Vector3d backproject(double u, double v, double depth, const CameraCalibration & calib)
{
  return {(u - calib.cx) * depth / calib.fx, (v - calib.cy) * depth / calib.fy, depth};
}

void Box3D::validate() const
{
  auto bad = [this](const std::string & field) {
    fail(
      ErrorKind::kValidation,
      "box id " + std::to_string(id) + " frame " + std::to_string(frame_index) + ": invalid " + field);
  };
  if (!(w > 0.0)) bad("w");
  if (!(h > 0.0)) bad("h");
  if (!(l > 0.0)) bad("l");
  if (!(theta > -std::numbers::pi && theta <= std::numbers::pi)) bad("theta");
  if (id < 0) bad("id");
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) bad("center");
  if (!velocity.allFinite()) bad("velocity");
  if (!acceleration.allFinite()) bad("acceleration");
  if (label.empty() || label.find_first_of(",\n\r") != std::string::npos) bad("class");
}

bool Box3D::operator==(const Box3D & o) const
{
  return frame_index == o.frame_index && id == o.id && label == o.label && x == o.x && y == o.y &&
         z == o.z && w == o.w && h == o.h && l == o.l && theta == o.theta && velocity == o.velocity &&
         acceleration == o.acceleration;
}

std::vector<Eigen::Vector3d> positions(const PointCloud & cloud)
{
  std::vector<Eigen::Vector3d> out;
  out.reserve(cloud.points.size());
  for (const auto & p : cloud.points) {
    out.push_back(p.position());
  }
  return out;
}

}  // namespace obstacle_forge
