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

#ifndef OBSTACLE_FORGE_DATASET_HPP
#define OBSTACLE_FORGE_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obstacle_forge/core.hpp"

// On-disk sequence layout (all paths relative to the sequence root):
//
//   manifest.json               sequence id, frame/camera counts, frame and camera timestamps
//   calibration.json            per-camera intrinsics + 4x4 ego->camera, lidar_extrinsic (ego<-lidar)
//   poses.csv                   timestamp,r00..r22,tx,ty,tz (world<-ego, row-major)
//   lidar/%06d.bin              float32 x,y,z,intensity + float64 timestamp, little-endian, 24 B/record
//   masks/<kind>/cam%02d/%06d.pgm   16-bit big-endian P5 graymap, kind in {road,instance,obstacle_candidate}
//   masks/instances.csv         instance_id,class
//   gt/boxes.csv                frame_index,id,class,x,y,z,w,h,l,theta,vx,vy,ax,ay
//
// Frame and camera indices are 1-based.

namespace obstacle_forge
{

inline constexpr std::size_t kLidarRecordBytes = 24;
inline constexpr const char * kBoxesHeader = "frame_index,id,class,x,y,z,w,h,l,theta,vx,vy,ax,ay";
inline constexpr const char * kPosesHeader = "timestamp,r00,r01,r02,r10,r11,r12,r20,r21,r22,tx,ty,tz";

enum class MaskKind
{
  kRoad,
  kInstance,
  kObstacleCandidate,
};

const char * to_string(MaskKind kind);

struct LabelMask
{
  int camera_id{1};
  int frame_index{1};
  MaskKind kind{MaskKind::kRoad};
  int width{0};
  int height{0};
  std::vector<std::uint16_t> pixels;  // row-major

  LabelMask() = default;
  LabelMask(int camera, int frame, MaskKind k, int w, int h)
  : camera_id(camera), frame_index(frame), kind(k), width(w), height(h),
    pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0)
  {
  }

  std::uint16_t at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }
  std::uint16_t & at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }

  bool operator==(const LabelMask & other) const = default;
};

struct SequenceManifest
{
  std::string sequence_id;
  int frame_count{0};
  int camera_count{0};
  /// Reference time of each frame (index i at [i - 1]); GT and predictions
  /// for frame i describe the scene at this time.
  std::vector<double> frame_times;
  /// camera_times[j - 1][i - 1] is the capture time of camera j, frame i.
  std::vector<std::vector<double>> camera_times;
};

struct LidarFrameInfo
{
  int frame_index{1};
  std::filesystem::path path;
  std::size_t point_count{0};
  double first_timestamp{0.0};
  double last_timestamp{0.0};
};

/// Validated sequence. Point clouds and masks are checked at load and read
/// on demand; everything else is resident.
class Dataset
{
public:
  std::filesystem::path root;
  SequenceManifest manifest;
  std::vector<LidarFrameInfo> lidar_frames;
  std::vector<CameraCalibration> cameras;
  std::vector<std::vector<CameraFrame>> camera_frames;  // per camera, by frame
  std::vector<StampedPose> poses;                       // world <- ego
  RigidTransform ego_from_lidar;
  std::map<int, std::string> instance_classes;

  int frame_count() const { return manifest.frame_count; }
  double frame_time(int frame_index) const { return manifest.frame_times.at(frame_index - 1); }

  PointCloud load_point_cloud(int frame_index) const;

  std::filesystem::path mask_path(MaskKind kind, int camera_id, int frame_index) const;
  /// nullopt when the file does not exist (a kind may be absent for a frame).
  std::optional<LabelMask> load_mask(MaskKind kind, int camera_id, int frame_index) const;

  /// Camera frame of `camera_id` closest in time to `t`.
  const CameraFrame & closest_camera_frame(int camera_id, double t) const;

  RigidTransform world_from_ego(double t) const { return interpolate_pose(poses, t); }
};

Dataset load_dataset(const std::filesystem::path & root);

// Individual component readers / writers, shared with synthgen.
SequenceManifest load_manifest(const std::filesystem::path & path);
void save_manifest(const SequenceManifest & manifest, const std::filesystem::path & path);

struct Calibration
{
  std::vector<CameraCalibration> cameras;
  RigidTransform ego_from_lidar;
};
Calibration load_calibration(const std::filesystem::path & path);
void save_calibration(const Calibration & calibration, const std::filesystem::path & path);

std::vector<StampedPose> load_poses(const std::filesystem::path & path);
void save_poses(std::span<const StampedPose> poses, const std::filesystem::path & path);

PointCloud load_point_cloud(const std::filesystem::path & path, int frame_index);
void save_point_cloud(const PointCloud & cloud, const std::filesystem::path & path);

LabelMask load_mask(const std::filesystem::path & path);
void save_mask(const LabelMask & mask, const std::filesystem::path & path);

std::map<int, std::string> load_instance_classes(const std::filesystem::path & path);
void save_instance_classes(const std::map<int, std::string> & classes, const std::filesystem::path & path);

std::vector<Box3D> load_boxes(const std::filesystem::path & path);
void save_boxes(std::span<const Box3D> boxes, const std::filesystem::path & path);

std::filesystem::path lidar_file_path(const std::filesystem::path & root, int frame_index);
std::filesystem::path mask_file_path(const std::filesystem::path & root, MaskKind kind, int camera_id, int frame_index);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
/// Strict parse of a full token; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_DATASET_HPP
