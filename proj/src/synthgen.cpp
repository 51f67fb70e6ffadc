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

#include "obstacle_forge/synthgen.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "obstacle_forge/fuse.hpp"
#include "obstacle_forge/random.hpp"

namespace obstacle_forge
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kGroundIntensity = 0.3;

// --- JSON helpers -----------------------------------------------------------

void check_keys(const json & j, std::initializer_list<const char *> allowed, const std::string & where)
{
  if (!j.is_object()) fail(ErrorKind::kParse, where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char * k : allowed) ok = ok || it.key() == k;
    if (!ok) fail(ErrorKind::kValidation, where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read_opt(const json & j, const char * key, T & out, const std::string & where)
{
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &) {
    fail(ErrorKind::kParse, where + "." + key + ": wrong type");
  }
}

template <int N>
void read_vec(const json & j, const char * key, Eigen::Matrix<double, N, 1> & out, const std::string & where)
{
  if (!j.contains(key)) return;
  const json & a = j.at(key);
  if (!a.is_array() || a.size() != static_cast<std::size_t>(N)) {
    fail(ErrorKind::kParse, where + "." + key + ": expected " + std::to_string(N) + " numbers");
  }
  for (int i = 0; i < N; ++i) {
    if (!a[static_cast<std::size_t>(i)].is_number()) fail(ErrorKind::kParse, where + "." + key + ": not a number");
    out(i) = a[static_cast<std::size_t>(i)].get<double>();
  }
}

template <typename V>
json vec_json(const V & v)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// --- ray casting --------------------------------------------------------------

/// Entry distance of a ray into an oriented box, or +inf.
double ray_box(const Eigen::Vector3d & o, const Eigen::Vector3d & d, const RigidTransform & world_from_box,
               const Eigen::Vector3d & half)
{
  const Eigen::Matrix3d rt = world_from_box.rotation().transpose();
  const Eigen::Vector3d lo = rt * (o - world_from_box.translation());
  const Eigen::Vector3d ld = rt * d;
  double t0 = 0.0;
  double t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(ld(a)) < 1e-15) {
      if (lo(a) < -half(a) || lo(a) > half(a)) return kInf;
      continue;
    }
    double ta = (-half(a) - lo(a)) / ld(a);
    double tb = (half(a) - lo(a)) / ld(a);
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return kInf;
  }
  return t0 > 1e-9 ? t0 : kInf;
}

/// Half extents in the obstacle frame (x along yaw = length).
Eigen::Vector3d half_extent(const ObstacleSpec & o)
{
  return {0.5 * o.extent(2), 0.5 * o.extent(0), 0.5 * o.extent(1)};
}

std::pair<double, double> slab_2d(const Eigen::Vector3d & o, const Eigen::Vector3d & d, const Eigen::Vector2d & lo,
                                  const Eigen::Vector2d & hi)
{
  double t0 = 0.0;
  double t1 = kInf;
  for (int a = 0; a < 2; ++a) {
    if (std::abs(d(a)) < 1e-15) {
      if (o(a) < lo(a) || o(a) > hi(a)) return {kInf, -kInf};
      continue;
    }
    double ta = (lo(a) - o(a)) / d(a);
    double tb = (hi(a) - o(a)) / d(a);
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return {t0, t1};
}

/// First intersection with the ground surface within [0, t_max].
double ray_surface(const SceneSpec & spec, const Eigen::Vector3d & o, const Eigen::Vector3d & d, double t_max)
{
  const double t_plane = d.z() < 0.0 ? -o.z() / d.z() : kInf;
  double lo = kInf;
  double hi = -kInf;
  for (const auto & b : spec.bumps) {
    const Eigen::Vector2d r(b.reach(), b.reach());
    const auto [ta, tb] = slab_2d(o, d, b.center - r, b.center + r);
    if (ta > tb || ta > t_max) continue;
    lo = std::min(lo, ta);
    hi = std::max(hi, std::min(tb, t_max));
  }
  if (lo > hi || t_plane < lo) return t_plane <= t_max ? t_plane : kInf;

  auto f = [&](double t) {
    const Eigen::Vector3d p = o + t * d;
    return p.z() - surface_height(spec, p.x(), p.y());
  };
  const double horiz = std::hypot(d.x(), d.y());
  const double step = horiz > 1e-12 ? 0.02 / horiz : (hi - lo);
  double prev = lo;
  for (double t = lo; t <= hi + step; t += step) {
    const double tc = std::min(t, hi);
    if (f(tc) <= 0.0) {
      double a = prev;
      double bnd = tc;
      for (int i = 0; i < 60; ++i) {
        const double m = 0.5 * (a + bnd);
        (f(m) > 0.0 ? a : bnd) = m;
      }
      return bnd;
    }
    prev = tc;
    if (tc >= hi) break;
  }
  return t_plane > hi && t_plane <= t_max ? t_plane : kInf;
}

struct Hit
{
  double t{kInf};
  int who{kHitGround};
};

Hit cast(const SceneSpec & spec, const std::vector<RigidTransform> & poses, const Eigen::Vector3d & o,
         const Eigen::Vector3d & d, double t_max)
{
  Hit best;
  for (std::size_t k = 0; k < spec.obstacles.size(); ++k) {
    const double t = ray_box(o, d, poses[k], half_extent(spec.obstacles[k]));
    if (t < best.t) best = {t, static_cast<int>(k)};
  }
  const double tg = ray_surface(spec, o, d, std::min(best.t, t_max));
  if (tg < best.t) best = {tg, kHitGround};
  if (best.t > t_max) best = {kInf, kHitGround};
  return best;
}

std::vector<RigidTransform> obstacle_poses(const SceneSpec & spec, double t)
{
  std::vector<RigidTransform> out;
  out.reserve(spec.obstacles.size());
  for (const auto & o : spec.obstacles) out.push_back(obstacle_pose(o, t));
  return out;
}

double gaussian(std::uint64_t key)
{
  const double u1 = std::max(to_unit(splitmix64(key ^ 0x1111)), 1e-300);
  const double u2 = to_unit(splitmix64(key ^ 0x2222));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double BumpSpec::height_at(double x, double y) const
{
  const double dist = std::max(std::abs(x - center.x()), std::abs(y - center.y()));
  if (dist <= half_size) return height;
  if (dist >= half_size + ramp) return 0.0;
  const double s = 1.0 - (dist - half_size) / ramp;
  return height * s * s;
}

int SceneSpec::frame_count() const { return static_cast<int>(std::llround(duration * lidar_rate)); }

double SceneSpec::frame_time(int frame_index) const
{
  return (frame_index - 1) * frame_period() + 0.5 * frame_period();
}

void SceneSpec::validate() const
{
  auto need = [](bool ok, const std::string & field) {
    if (!ok) fail(ErrorKind::kValidation, "scene: invalid " + field);
  };
  need(duration > 0.0 && std::isfinite(duration), "duration");
  need(lidar_rate > 0.0 && std::isfinite(lidar_rate), "lidar_rate");
  need(frame_count() >= 1, "duration * lidar_rate (no frames)");
  need(std::isfinite(ego_speed), "ego_speed");
  need(road_width > 0.0, "road_width");
  need(beam_count >= 1, "beam_count");
  need(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise_sigma");
  need(max_range > 0.0 && std::isfinite(max_range), "max_range");
  need(lidar_height > 0.0, "lidar_height");
  need(min_elevation_deg <= max_elevation_deg, "min_elevation_deg");
  need(azimuth_step_deg > 0.0, "azimuth_step_deg");
  need(azimuth_fov_deg > 0.0 && azimuth_fov_deg <= 360.0, "azimuth_fov_deg");
  need(!cameras.empty(), "cameras (at least one)");
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const auto & c = cameras[i];
    const std::string f = "cameras[" + std::to_string(i) + "]";
    need(c.width > 0 && c.height > 0, f + ".width/height");
    need(c.fx > 0.0 && c.fy > 0.0, f + ".fx/fy");
    need(c.cx >= 0.0 && c.cx < c.width && c.cy >= 0.0 && c.cy < c.height, f + ".cx/cy");
  }
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto & o = obstacles[i];
    const std::string f = "obstacles[" + std::to_string(i) + "]";
    need(o.extent.minCoeff() > 0.0 && o.extent.allFinite(), f + ".extent");
    need(o.reflectivity >= 0.0 && o.reflectivity <= 1.0, f + ".reflectivity");
    need(!o.label.empty() && o.label.find(',') == std::string::npos, f + ".class");
    need(o.position.allFinite() && o.velocity.allFinite() && std::isfinite(o.yaw), f + ".position/velocity/yaw");
  }
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    const auto & b = bumps[i];
    const std::string f = "bumps[" + std::to_string(i) + "]";
    need(b.half_size >= 0.0 && b.ramp >= 0.0 && b.reach() > 0.0, f + ".half_size/ramp");
    need(std::isfinite(b.height), f + ".height");
  }
  need(obstacles.size() < 65535, "obstacles (too many)");
}

SceneSpec scene_from_json(const std::string & text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception & e) {
    fail(ErrorKind::kParse, std::string("scene: ") + e.what());
  }
  check_keys(
    j,
    {"seed", "duration", "lidar_rate", "ego_speed", "road_width", "beam_count", "noise_sigma", "max_range",
     "lidar_height", "min_elevation_deg", "max_elevation_deg", "azimuth_step_deg", "azimuth_fov_deg", "cameras",
     "obstacles", "bumps"},
    "scene");
  SceneSpec s;
  read_opt(j, "seed", s.seed, "scene");
  read_opt(j, "duration", s.duration, "scene");
  read_opt(j, "lidar_rate", s.lidar_rate, "scene");
  read_opt(j, "ego_speed", s.ego_speed, "scene");
  read_opt(j, "road_width", s.road_width, "scene");
  read_opt(j, "beam_count", s.beam_count, "scene");
  read_opt(j, "noise_sigma", s.noise_sigma, "scene");
  read_opt(j, "max_range", s.max_range, "scene");
  read_opt(j, "lidar_height", s.lidar_height, "scene");
  read_opt(j, "min_elevation_deg", s.min_elevation_deg, "scene");
  read_opt(j, "max_elevation_deg", s.max_elevation_deg, "scene");
  read_opt(j, "azimuth_step_deg", s.azimuth_step_deg, "scene");
  read_opt(j, "azimuth_fov_deg", s.azimuth_fov_deg, "scene");
  if (j.contains("cameras")) {
    s.cameras.clear();
    for (const auto & c : j.at("cameras")) {
      const std::string w = "scene.cameras[" + std::to_string(s.cameras.size()) + "]";
      check_keys(c, {"width", "height", "fx", "fy", "cx", "cy", "mount", "pitch_deg"}, w);
      CameraSpec cam;
      read_opt(c, "width", cam.width, w);
      read_opt(c, "height", cam.height, w);
      read_opt(c, "fx", cam.fx, w);
      read_opt(c, "fy", cam.fy, w);
      read_opt(c, "cx", cam.cx, w);
      read_opt(c, "cy", cam.cy, w);
      read_vec<3>(c, "mount", cam.mount, w);
      read_opt(c, "pitch_deg", cam.pitch_deg, w);
      s.cameras.push_back(cam);
    }
  }
  if (j.contains("obstacles")) {
    for (const auto & o : j.at("obstacles")) {
      const std::string w = "scene.obstacles[" + std::to_string(s.obstacles.size()) + "]";
      check_keys(o, {"position", "extent", "yaw", "reflectivity", "class", "velocity"}, w);
      ObstacleSpec ob;
      read_vec<3>(o, "position", ob.position, w);
      read_vec<3>(o, "extent", ob.extent, w);
      read_opt(o, "yaw", ob.yaw, w);
      read_opt(o, "reflectivity", ob.reflectivity, w);
      read_opt(o, "class", ob.label, w);
      read_vec<2>(o, "velocity", ob.velocity, w);
      s.obstacles.push_back(ob);
    }
  }
  if (j.contains("bumps")) {
    for (const auto & b : j.at("bumps")) {
      const std::string w = "scene.bumps[" + std::to_string(s.bumps.size()) + "]";
      check_keys(b, {"center", "half_size", "ramp", "height"}, w);
      BumpSpec bs;
      read_vec<2>(b, "center", bs.center, w);
      read_opt(b, "half_size", bs.half_size, w);
      read_opt(b, "ramp", bs.ramp, w);
      read_opt(b, "height", bs.height, w);
      s.bumps.push_back(bs);
    }
  }
  s.validate();
  return s;
}

SceneSpec load_scene(const fs::path & path)
{
  if (!fs::exists(path)) fail(ErrorKind::kNotFound, "missing file: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

std::string scene_to_json(const SceneSpec & s)
{
  json j;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["lidar_rate"] = s.lidar_rate;
  j["ego_speed"] = s.ego_speed;
  j["road_width"] = s.road_width;
  j["beam_count"] = s.beam_count;
  j["noise_sigma"] = s.noise_sigma;
  j["max_range"] = s.max_range;
  j["lidar_height"] = s.lidar_height;
  j["min_elevation_deg"] = s.min_elevation_deg;
  j["max_elevation_deg"] = s.max_elevation_deg;
  j["azimuth_step_deg"] = s.azimuth_step_deg;
  j["azimuth_fov_deg"] = s.azimuth_fov_deg;
  j["cameras"] = json::array();
  for (const auto & c : s.cameras) {
    j["cameras"].push_back({{"width", c.width}, {"height", c.height}, {"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx},
                            {"cy", c.cy}, {"mount", vec_json(c.mount)}, {"pitch_deg", c.pitch_deg}});
  }
  j["obstacles"] = json::array();
  for (const auto & o : s.obstacles) {
    j["obstacles"].push_back({{"position", vec_json(o.position)}, {"extent", vec_json(o.extent)}, {"yaw", o.yaw},
                              {"reflectivity", o.reflectivity}, {"class", o.label},
                              {"velocity", vec_json(o.velocity)}});
  }
  j["bumps"] = json::array();
  for (const auto & b : s.bumps) {
    j["bumps"].push_back(
      {{"center", vec_json(b.center)}, {"half_size", b.half_size}, {"ramp", b.ramp}, {"height", b.height}});
  }
  return j.dump(2);
}

double surface_height(const SceneSpec & spec, double x, double y)
{
  double z = 0.0;
  for (const auto & b : spec.bumps) z += b.height_at(x, y);
  return z;
}

RigidTransform ego_pose(const SceneSpec & spec, double t)
{
  return RigidTransform::from_translation({spec.ego_speed * t, 0.0, 0.0});
}

RigidTransform ego_from_lidar(const SceneSpec & spec)
{
  return RigidTransform::from_translation({0.0, 0.0, spec.lidar_height});
}

CameraCalibration camera_calibration(const SceneSpec & spec, std::size_t camera_index)
{
  const CameraSpec & c = spec.cameras.at(camera_index);
  Eigen::Matrix3d base;
  base << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  const Eigen::Matrix3d pitch = Eigen::AngleAxisd(c.pitch_deg * kDegToRad, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d r = orthonormalize(pitch * base);
  CameraCalibration calib;
  calib.camera_id = static_cast<int>(camera_index) + 1;
  calib.fx = c.fx;
  calib.fy = c.fy;
  calib.cx = c.cx;
  calib.cy = c.cy;
  calib.width = c.width;
  calib.height = c.height;
  calib.camera_from_ego = RigidTransform(r, -(r * c.mount));
  return calib;
}

RigidTransform obstacle_pose(const ObstacleSpec & o, double t)
{
  const Eigen::Vector3d c = o.position + Eigen::Vector3d(o.velocity.x(), o.velocity.y(), 0.0) * t;
  return RigidTransform::from_yaw(o.yaw, c);
}

SimulatedFrame simulate_lidar(const SceneSpec & spec, int frame_index)
{
  const double period = spec.frame_period();
  const double t_start = (frame_index - 1) * period;
  const int n_az = std::max(1, static_cast<int>(std::llround(spec.azimuth_fov_deg / spec.azimuth_step_deg)));
  const double az_step = spec.azimuth_fov_deg / n_az;
  const RigidTransform lidar_mount = ego_from_lidar(spec);

  SimulatedFrame out;
  out.cloud.frame_index = frame_index;
  for (int k = 0; k < n_az; ++k) {
    const double az_deg = -0.5 * spec.azimuth_fov_deg + (k + 0.5) * az_step;
    const double t = t_start + period * (az_deg + 180.0) / 360.0;
    const RigidTransform world_from_lidar = ego_pose(spec, t) * lidar_mount;
    const RigidTransform lidar_from_world = world_from_lidar.inverse();
    const auto poses = obstacle_poses(spec, t);
    const Eigen::Vector3d origin = world_from_lidar.translation();
    const double az = az_deg * kDegToRad;
    for (int b = 0; b < spec.beam_count; ++b) {
      const double el_deg =
        spec.beam_count == 1
          ? spec.min_elevation_deg
          : spec.min_elevation_deg + (spec.max_elevation_deg - spec.min_elevation_deg) * b / (spec.beam_count - 1);
      const double el = el_deg * kDegToRad;
      const Eigen::Vector3d dir_l(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      const Eigen::Vector3d dir = world_from_lidar.rotation() * dir_l;
      const Hit hit = cast(spec, poses, origin, dir, spec.max_range);
      if (!std::isfinite(hit.t)) continue;
      const std::uint64_t key = hash_key({spec.seed, static_cast<std::uint64_t>(frame_index),
                                          static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(k)});
      double intensity = kGroundIntensity;
      if (hit.who >= 0) {
        const double refl = spec.obstacles[static_cast<std::size_t>(hit.who)].reflectivity;
        if (to_unit(splitmix64(key ^ 0x3333)) < 1.0 - refl) continue;
        intensity = refl;
      }
      const double noise = std::clamp(gaussian(key) * spec.noise_sigma, -6.0 * spec.noise_sigma, 6.0 * spec.noise_sigma);
      const double range = hit.t + noise;
      const Eigen::Vector3d ideal = origin + hit.t * dir;
      const Eigen::Vector3d p_world = origin + range * dir;
      const Eigen::Vector3d p = lidar_from_world * p_world;
      out.cloud.points.push_back({p.x(), p.y(), p.z(), intensity, t});
      out.hit.push_back(hit.who);
      out.ideal_world.push_back(ideal);
    }
  }
  return out;
}

RenderedMasks render_masks(const SceneSpec & spec, std::size_t camera_index, int frame_index)
{
  const CameraCalibration calib = camera_calibration(spec, camera_index);
  const double t = spec.frame_time(frame_index);
  const RigidTransform world_from_cam = ego_pose(spec, t) * calib.camera_from_ego.inverse();
  const auto poses = obstacle_poses(spec, t);
  const Eigen::Vector3d origin = world_from_cam.translation();
  const int id = calib.camera_id;
  RenderedMasks m{LabelMask(id, frame_index, MaskKind::kRoad, calib.width, calib.height),
                  LabelMask(id, frame_index, MaskKind::kObstacleCandidate, calib.width, calib.height),
                  LabelMask(id, frame_index, MaskKind::kInstance, calib.width, calib.height)};
  const double half_road = 0.5 * spec.road_width;
  const double far = 4.0 * spec.max_range;
  for (int v = 0; v < calib.height; ++v) {
    for (int u = 0; u < calib.width; ++u) {
      const Eigen::Vector3d dc((u + 0.5 - calib.cx) / calib.fx, (v + 0.5 - calib.cy) / calib.fy, 1.0);
      const Eigen::Vector3d dir = (world_from_cam.rotation() * dc).normalized();
      const Hit hit = cast(spec, poses, origin, dir, far);
      if (!std::isfinite(hit.t)) continue;
      if (hit.who >= 0) {
        const auto label = static_cast<std::uint16_t>(hit.who + 1);
        m.obstacle_candidate.at(u, v) = label;
        if (spec.obstacles[static_cast<std::size_t>(hit.who)].closed_set()) m.instance.at(u, v) = label;
        continue;
      }
      const Eigen::Vector3d p = origin + hit.t * dir;
      const double horiz = std::hypot(p.x() - origin.x(), p.y() - origin.y());
      if (std::abs(p.y()) <= half_road && horiz <= spec.max_range) m.road.at(u, v) = 1;
    }
  }
  return m;
}

std::vector<Box3D> ground_truth_boxes(const SceneSpec & spec)
{
  std::vector<Box3D> out;
  const int n = spec.frame_count();
  for (std::size_t k = 0; k < spec.obstacles.size(); ++k) {
    const ObstacleSpec & o = spec.obstacles[k];
    std::vector<Box3D> boxes;
    std::vector<double> times;
    std::vector<Eigen::Vector2d> xy;
    for (int i = 1; i <= n; ++i) {
      const double t = spec.frame_time(i);
      const RigidTransform pose = obstacle_pose(o, t);
      const Eigen::Vector3d ego = ego_pose(spec, t).translation();
      const Eigen::Vector3d c = pose.translation();
      if (std::hypot(c.x() - ego.x(), c.y() - ego.y()) > spec.max_range) continue;
      Box3D b;
      b.frame_index = i;
      b.id = static_cast<std::int64_t>(k) + 1;
      b.label = o.label;
      b.x = c.x();
      b.y = c.y();
      b.z = c.z();
      b.w = o.extent(0);
      b.h = o.extent(1);
      b.l = o.extent(2);
      b.theta = normalize_angle(o.yaw);
      boxes.push_back(b);
      times.push_back(t);
      xy.push_back(c.head<2>());
    }
    const auto kin = estimate_kinematics(times, xy);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      boxes[i].velocity = kin[i].velocity;
      boxes[i].acceleration = kin[i].acceleration;
    }
    out.insert(out.end(), boxes.begin(), boxes.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const Box3D & a, const Box3D & b) {
    return a.frame_index < b.frame_index || (a.frame_index == b.frame_index && a.id < b.id);
  });
  return out;
}

SequenceManifest generate(const SceneSpec & spec, const fs::path & out)
{
  spec.validate();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create " + out.string() + ": " + ec.message());

  const int n = spec.frame_count();
  SequenceManifest manifest;
  manifest.sequence_id = "synth-" + std::to_string(spec.seed);
  manifest.frame_count = n;
  manifest.camera_count = static_cast<int>(spec.cameras.size());
  for (int i = 1; i <= n; ++i) manifest.frame_times.push_back(spec.frame_time(i));
  manifest.camera_times.assign(spec.cameras.size(), manifest.frame_times);
  save_manifest(manifest, out / "manifest.json");

  Calibration calib;
  calib.ego_from_lidar = ego_from_lidar(spec);
  for (std::size_t c = 0; c < spec.cameras.size(); ++c) calib.cameras.push_back(camera_calibration(spec, c));
  save_calibration(calib, out / "calibration.json");

  // Ten pose samples per sweep cover [0, duration] inclusive.
  std::vector<StampedPose> poses;
  const int pose_steps = n * 10;
  for (int k = 0; k <= pose_steps; ++k) {
    const double t = spec.duration * k / pose_steps;
    poses.push_back({t, ego_pose(spec, t)});
  }
  save_poses(poses, out / "poses.csv");

  bool any_closed_set = false;
  std::map<int, std::string> classes;
  for (std::size_t k = 0; k < spec.obstacles.size(); ++k) {
    if (spec.obstacles[k].closed_set()) {
      any_closed_set = true;
      classes[static_cast<int>(k) + 1] = spec.obstacles[k].label;
    }
  }
  save_instance_classes(classes, out / "masks" / "instances.csv");

  for (int i = 1; i <= n; ++i) {
    save_point_cloud(simulate_lidar(spec, i).cloud, lidar_file_path(out, i));
    for (std::size_t c = 0; c < spec.cameras.size(); ++c) {
      const RenderedMasks m = render_masks(spec, c, i);
      const int id = static_cast<int>(c) + 1;
      save_mask(m.road, mask_file_path(out, MaskKind::kRoad, id, i));
      save_mask(m.obstacle_candidate, mask_file_path(out, MaskKind::kObstacleCandidate, id, i));
      if (any_closed_set) save_mask(m.instance, mask_file_path(out, MaskKind::kInstance, id, i));
    }
  }
  save_boxes(ground_truth_boxes(spec), out / "gt" / "boxes.csv");
  return manifest;
}

}  // namespace obstacle_forge
