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

#include "obstacle_forge/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace obstacle_forge
{

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary I/O assumes a little-endian host");

namespace
{

std::string path_str(const fs::path & p) { return p.string(); }

void require_exists(const fs::path & path)
{
  if (!fs::exists(path)) {
    fail(ErrorKind::kNotFound, "missing file: " + path_str(path));
  }
}

std::ifstream open_in(const fs::path & path, std::ios::openmode mode = std::ios::in)
{
  require_exists(path);
  std::ifstream in(path, mode);
  if (!in) {
    fail(ErrorKind::kIo, "cannot open " + path_str(path));
  }
  return in;
}

std::ofstream open_out(const fs::path & path, std::ios::openmode mode = std::ios::out)
{
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) {
    fail(ErrorKind::kIo, "cannot write " + path_str(path));
  }
  return out;
}

void finish_write(std::ofstream & out, const fs::path & path)
{
  out.flush();
  if (!out) {
    fail(ErrorKind::kIo, "write failed: " + path_str(path));
  }
}

std::vector<std::string_view> split_csv(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view chomp(std::string_view line)
{
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.remove_suffix(1);
  }
  return line;
}

[[noreturn]] void parse_fail(const fs::path & path, std::size_t line_no, const std::string & what)
{
  fail(ErrorKind::kParse, path_str(path) + ":" + std::to_string(line_no) + ": " + what);
}

double field_double(const fs::path & path, std::size_t line_no, std::string_view text, const char * name)
{
  const auto v = parse_double(text);
  if (!v || !std::isfinite(*v)) {
    parse_fail(path, line_no, std::string("bad ") + name + " '" + std::string(text) + "'");
  }
  return *v;
}

template <typename Int>
Int field_int(const fs::path & path, std::size_t line_no, std::string_view text, const char * name)
{
  Int value{};
  const auto * end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    parse_fail(path, line_no, std::string("bad ") + name + " '" + std::string(text) + "'");
  }
  return value;
}

json read_json(const fs::path & path)
{
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error & e) {
    fail(ErrorKind::kParse, path_str(path) + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

RigidTransform transform_from_json(const json & j, const std::string & what)
{
  if (!j.is_array() || j.size() != 4) {
    fail(ErrorKind::kValidation, what + ": expected 4x4 matrix");
  }
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    if (!j[r].is_array() || j[r].size() != 4) {
      fail(ErrorKind::kValidation, what + ": expected 4x4 matrix");
    }
    for (int c = 0; c < 4; ++c) {
      m(r, c) = j[r][c].get<double>();
    }
  }
  auto t = RigidTransform::from_matrix(m);
  if (!t.is_valid(1e-6)) {
    fail(ErrorKind::kValidation, what + ": rotation is not orthonormal");
  }
  return t;
}

json transform_to_json(const RigidTransform & t)
{
  const Eigen::Matrix4d m = t.matrix();
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
  }
  return rows;
}

void write_json(const json & j, const fs::path & path)
{
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish_write(out, path);
}

struct PgmHeader
{
  int width{0};
  int height{0};
  int maxval{0};
  std::streamoff data_offset{0};
};

PgmHeader read_pgm_header(std::istream & in, const fs::path & path)
{
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    fail(ErrorKind::kParse, path_str(path) + ": byte 0: magic number mismatch (expected P5)");
  }
  std::array<int, 3> values{};
  for (int & value : values) {
    int c = in.get();
    while (true) {
      if (c == '#') {
        while (c != '\n' && c != EOF) c = in.get();
      } else if (std::isspace(c)) {
        c = in.get();
      } else {
        break;
      }
    }
    if (c == EOF || !std::isdigit(c)) {
      fail(ErrorKind::kParse, path_str(path) + ": byte " + std::to_string(static_cast<long long>(in.tellg())) +
                                ": malformed graymap header");
    }
    long long v = 0;
    while (c != EOF && std::isdigit(c)) {
      v = v * 10 + (c - '0');
      if (v > 1000000) break;
      c = in.get();
    }
    value = static_cast<int>(v);
    if (c == EOF || !std::isspace(c)) {
      fail(ErrorKind::kParse, path_str(path) + ": malformed graymap header");
    }
  }
  PgmHeader h{values[0], values[1], values[2], in.tellg()};
  if (h.width < 1 || h.height < 1 || h.maxval < 1 || h.maxval > 65535) {
    fail(ErrorKind::kParse, path_str(path) + ": graymap header out of range");
  }
  return h;
}

std::optional<MaskKind> mask_kind_from_string(std::string_view s)
{
  if (s == "road") return MaskKind::kRoad;
  if (s == "instance") return MaskKind::kInstance;
  if (s == "obstacle_candidate") return MaskKind::kObstacleCandidate;
  return std::nullopt;
}

std::string frame_file(int frame_index, const char * ext)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d%s", frame_index, ext);
  return buf;
}

std::string camera_dir(int camera_id)
{
  char buf[16];
  std::snprintf(buf, sizeof(buf), "cam%02d", camera_id);
  return buf;
}

}  // namespace

const char * to_string(MaskKind kind)
{
  switch (kind) {
    case MaskKind::kRoad:
      return "road";
    case MaskKind::kInstance:
      return "instance";
    case MaskKind::kObstacleCandidate:
      return "obstacle_candidate";
  }
  return "road";
}

std::string format_double(double value)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text)
{
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto * end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------
// manifest / calibration / poses

SequenceManifest load_manifest(const fs::path & path)
{
  const json j = read_json(path);
  SequenceManifest m;
  try {
    m.sequence_id = j.at("sequence_id").get<std::string>();
    m.frame_count = j.at("frame_count").get<int>();
    m.camera_count = j.at("camera_count").get<int>();
    m.frame_times = j.at("frame_times").get<std::vector<double>>();
    m.camera_times = j.at("camera_times").get<std::vector<std::vector<double>>>();
  } catch (const json::exception & e) {
    fail(ErrorKind::kValidation, path_str(path) + ": " + e.what());
  }
  if (m.frame_count < 0 || static_cast<int>(m.frame_times.size()) != m.frame_count) {
    fail(ErrorKind::kValidation, path_str(path) + ": frame_times length must equal frame_count");
  }
  if (m.camera_count < 0 || static_cast<int>(m.camera_times.size()) != m.camera_count) {
    fail(ErrorKind::kValidation, path_str(path) + ": camera_times length must equal camera_count");
  }
  for (const auto & times : m.camera_times) {
    if (!std::is_sorted(times.begin(), times.end())) {
      fail(ErrorKind::kValidation, path_str(path) + ": camera_times must be nondecreasing");
    }
  }
  if (!std::is_sorted(m.frame_times.begin(), m.frame_times.end())) {
    fail(ErrorKind::kValidation, path_str(path) + ": frame_times must be nondecreasing");
  }
  return m;
}

void save_manifest(const SequenceManifest & m, const fs::path & path)
{
  json j;
  j["sequence_id"] = m.sequence_id;
  j["frame_count"] = m.frame_count;
  j["camera_count"] = m.camera_count;
  j["frame_times"] = m.frame_times;
  j["camera_times"] = m.camera_times;
  write_json(j, path);
}

Calibration load_calibration(const fs::path & path)
{
  const json j = read_json(path);
  Calibration calib;
  try {
    calib.ego_from_lidar = transform_from_json(j.at("lidar_extrinsic"), "lidar_extrinsic");
    for (const auto & cj : j.at("cameras")) {
      CameraCalibration c;
      c.camera_id = cj.at("camera_id").get<int>();
      c.fx = cj.at("fx").get<double>();
      c.fy = cj.at("fy").get<double>();
      c.cx = cj.at("cx").get<double>();
      c.cy = cj.at("cy").get<double>();
      c.width = cj.at("width").get<int>();
      c.height = cj.at("height").get<int>();
      c.camera_from_ego = transform_from_json(cj.at("extrinsic"), "camera extrinsic");
      c.validate();
      calib.cameras.push_back(c);
    }
  } catch (const json::exception & e) {
    fail(ErrorKind::kValidation, path_str(path) + ": " + e.what());
  } catch (const Error & e) {
    fail(e.kind(), path_str(path) + ": " + e.what());
  }
  for (std::size_t i = 0; i < calib.cameras.size(); ++i) {
    if (calib.cameras[i].camera_id != static_cast<int>(i) + 1) {
      fail(ErrorKind::kValidation, path_str(path) + ": camera_id must be 1..N_cam in order");
    }
  }
  return calib;
}

void save_calibration(const Calibration & calib, const fs::path & path)
{
  json j;
  j["lidar_extrinsic"] = transform_to_json(calib.ego_from_lidar);
  j["cameras"] = json::array();
  for (const auto & c : calib.cameras) {
    j["cameras"].push_back({
      {"camera_id", c.camera_id},
      {"fx", c.fx},
      {"fy", c.fy},
      {"cx", c.cx},
      {"cy", c.cy},
      {"width", c.width},
      {"height", c.height},
      {"extrinsic", transform_to_json(c.camera_from_ego)},
    });
  }
  write_json(j, path);
}

std::vector<StampedPose> load_poses(const fs::path & path)
{
  auto in = open_in(path);
  std::vector<StampedPose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = chomp(line);
    if (text.empty()) continue;
    if (line_no == 1 && text.starts_with("timestamp")) continue;
    const auto f = split_csv(text);
    if (f.size() != 13) {
      parse_fail(path, line_no, "expected 13 fields, got " + std::to_string(f.size()));
    }
    StampedPose p;
    p.timestamp = field_double(path, line_no, f[0], "timestamp");
    Eigen::Matrix3d r;
    for (int k = 0; k < 9; ++k) {
      r(k / 3, k % 3) = field_double(path, line_no, f[1 + k], "rotation");
    }
    const Eigen::Vector3d t(
      field_double(path, line_no, f[10], "tx"), field_double(path, line_no, f[11], "ty"),
      field_double(path, line_no, f[12], "tz"));
    p.world_from_ego = RigidTransform(r, t);
    if (!p.world_from_ego.is_valid(1e-6)) {
      fail(ErrorKind::kValidation, path_str(path) + ":" + std::to_string(line_no) + ": rotation not orthonormal");
    }
    if (!poses.empty() && !(p.timestamp > poses.back().timestamp)) {
      fail(
        ErrorKind::kValidation, path_str(path) + ":" + std::to_string(line_no) + ": timestamps must increase");
    }
    poses.push_back(p);
  }
  return poses;
}

void save_poses(std::span<const StampedPose> poses, const fs::path & path)
{
  auto out = open_out(path);
  out << kPosesHeader << '\n';
  for (const auto & p : poses) {
    out << format_double(p.timestamp);
    const auto & r = p.world_from_ego.rotation();
    for (int k = 0; k < 9; ++k) out << ',' << format_double(r(k / 3, k % 3));
    const auto & t = p.world_from_ego.translation();
    for (int k = 0; k < 3; ++k) out << ',' << format_double(t(k));
    out << '\n';
  }
  finish_write(out, path);
}

// ---------------------------------------------------------------------------
// point clouds

PointCloud load_point_cloud(const fs::path & path, int frame_index)
{
  auto in = open_in(path, std::ios::binary);
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  if (size % kLidarRecordBytes != 0) {
    const std::size_t offset = size - size % kLidarRecordBytes;
    fail(
      ErrorKind::kParse, path_str(path) + ": byte " + std::to_string(offset) + ": truncated record (file size " +
                           std::to_string(size) + " is not a multiple of 24)");
  }
  std::vector<char> buffer(size);
  in.read(buffer.data(), static_cast<std::streamsize>(size));
  if (!in) {
    fail(ErrorKind::kIo, "read failed: " + path_str(path));
  }
  PointCloud cloud;
  cloud.frame_index = frame_index;
  const std::size_t n = size / kLidarRecordBytes;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const char * rec = buffer.data() + i * kLidarRecordBytes;
    float xyzi[4];
    double ts = 0.0;
    std::memcpy(xyzi, rec, sizeof(xyzi));
    std::memcpy(&ts, rec + 16, sizeof(ts));
    if (!std::isfinite(xyzi[0]) || !std::isfinite(xyzi[1]) || !std::isfinite(xyzi[2]) || !std::isfinite(ts)) {
      fail(ErrorKind::kParse, path_str(path) + ": byte " + std::to_string(i * kLidarRecordBytes) + ": non-finite value");
    }
    if (ts < 0.0) {
      fail(
        ErrorKind::kValidation,
        path_str(path) + ": byte " + std::to_string(i * kLidarRecordBytes + 16) + ": negative timestamp");
    }
    cloud.points[i] = {xyzi[0], xyzi[1], xyzi[2], xyzi[3], ts};
  }
  return cloud;
}

void save_point_cloud(const PointCloud & cloud, const fs::path & path)
{
  auto out = open_out(path, std::ios::binary);
  std::vector<char> buffer(cloud.points.size() * kLidarRecordBytes);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto & p = cloud.points[i];
    const float xyzi[4] = {
      static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z), static_cast<float>(p.intensity)};
    char * rec = buffer.data() + i * kLidarRecordBytes;
    std::memcpy(rec, xyzi, sizeof(xyzi));
    std::memcpy(rec + 16, &p.timestamp, sizeof(double));
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  finish_write(out, path);
}

// ---------------------------------------------------------------------------
// masks

LabelMask load_mask(const fs::path & path)
{
  auto in = open_in(path, std::ios::binary);
  const PgmHeader h = read_pgm_header(in, path);
  const std::size_t bytes_per = h.maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  std::vector<unsigned char> raw(n * bytes_per);
  in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    fail(
      ErrorKind::kParse, path_str(path) + ": byte " + std::to_string(h.data_offset + in.gcount()) +
                           ": truncated graymap payload");
  }
  LabelMask mask;
  mask.width = h.width;
  mask.height = h.height;
  mask.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask.pixels[i] =
      bytes_per == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : static_cast<std::uint16_t>(raw[i]);
  }
  // Infer identity from the canonical layout when possible.
  const auto cam = path.parent_path().filename().string();
  const auto kind = path.parent_path().parent_path().filename().string();
  if (cam.size() == 5 && cam.starts_with("cam")) {
    int id = 0;
    if (std::from_chars(cam.data() + 3, cam.data() + 5, id).ec == std::errc()) mask.camera_id = id;
  }
  if (auto k = mask_kind_from_string(kind)) mask.kind = *k;
  const auto stem = path.stem().string();
  int frame = 0;
  const auto res = std::from_chars(stem.data(), stem.data() + stem.size(), frame);
  if (res.ec == std::errc() && res.ptr == stem.data() + stem.size()) mask.frame_index = frame;
  return mask;
}

void save_mask(const LabelMask & mask, const fs::path & path)
{
  if (mask.width < 1 || mask.height < 1 ||
      mask.pixels.size() != static_cast<std::size_t>(mask.width) * static_cast<std::size_t>(mask.height)) {
    fail(ErrorKind::kValidation, "mask dimensions do not match pixel count");
  }
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << mask.width << ' ' << mask.height << "\n65535\n";
  std::vector<unsigned char> raw(mask.pixels.size() * 2);
  for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(mask.pixels[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(mask.pixels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  finish_write(out, path);
}

std::map<int, std::string> load_instance_classes(const fs::path & path)
{
  auto in = open_in(path);
  std::map<int, std::string> classes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = chomp(line);
    if (text.empty()) continue;
    if (line_no == 1 && text.starts_with("instance_id")) continue;
    const auto f = split_csv(text);
    if (f.size() != 2 || f[1].empty()) {
      parse_fail(path, line_no, "expected instance_id,class");
    }
    const int id = field_int<int>(path, line_no, f[0], "instance_id");
    if (id < 1 || id > 65535) {
      parse_fail(path, line_no, "instance_id out of range");
    }
    classes[id] = std::string(f[1]);
  }
  return classes;
}

void save_instance_classes(const std::map<int, std::string> & classes, const fs::path & path)
{
  auto out = open_out(path);
  out << "instance_id,class\n";
  for (const auto & [id, name] : classes) {
    out << id << ',' << name << '\n';
  }
  finish_write(out, path);
}

// ---------------------------------------------------------------------------
// boxes

std::vector<Box3D> load_boxes(const fs::path & path)
{
  auto in = open_in(path);
  std::vector<Box3D> boxes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = chomp(line);
    if (line_no == 1) {
      if (text != kBoxesHeader) {
        parse_fail(path, line_no, "expected header '" + std::string(kBoxesHeader) + "'");
      }
      continue;
    }
    if (text.empty()) continue;
    const auto f = split_csv(text);
    if (f.size() != 14) {
      parse_fail(path, line_no, "expected 14 fields, got " + std::to_string(f.size()));
    }
    Box3D b;
    b.frame_index = field_int<int>(path, line_no, f[0], "frame_index");
    b.id = field_int<std::int64_t>(path, line_no, f[1], "id");
    b.label = std::string(f[2]);
    b.x = field_double(path, line_no, f[3], "x");
    b.y = field_double(path, line_no, f[4], "y");
    b.z = field_double(path, line_no, f[5], "z");
    b.w = field_double(path, line_no, f[6], "w");
    b.h = field_double(path, line_no, f[7], "h");
    b.l = field_double(path, line_no, f[8], "l");
    b.theta = field_double(path, line_no, f[9], "theta");
    b.velocity = {field_double(path, line_no, f[10], "vx"), field_double(path, line_no, f[11], "vy")};
    b.acceleration = {field_double(path, line_no, f[12], "ax"), field_double(path, line_no, f[13], "ay")};
    try {
      b.validate();
    } catch (const Error & e) {
      parse_fail(path, line_no, e.what());
    }
    boxes.push_back(std::move(b));
  }
  if (line_no == 0) {
    parse_fail(path, 1, "missing header");
  }
  return boxes;
}

void save_boxes(std::span<const Box3D> boxes, const fs::path & path)
{
  for (const auto & b : boxes) b.validate();
  auto out = open_out(path);
  out << kBoxesHeader << '\n';
  for (const auto & b : boxes) {
    out << b.frame_index << ',' << b.id << ',' << b.label;
    for (double v : {b.x, b.y, b.z, b.w, b.h, b.l, b.theta, b.velocity.x(), b.velocity.y(), b.acceleration.x(),
                     b.acceleration.y()}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
  finish_write(out, path);
}

// ---------------------------------------------------------------------------
// dataset

PointCloud Dataset::load_point_cloud(int frame_index) const
{
  if (frame_index < 1 || frame_index > frame_count()) {
    fail(ErrorKind::kOutOfRange, "frame index " + std::to_string(frame_index) + " out of range");
  }
  return obstacle_forge::load_point_cloud(lidar_frames[frame_index - 1].path, frame_index);
}

fs::path lidar_file_path(const fs::path & root, int frame_index)
{
  return root / "lidar" / frame_file(frame_index, ".bin");
}

fs::path mask_file_path(const fs::path & root, MaskKind kind, int camera_id, int frame_index)
{
  return root / "masks" / to_string(kind) / camera_dir(camera_id) / frame_file(frame_index, ".pgm");
}

fs::path Dataset::mask_path(MaskKind kind, int camera_id, int frame_index) const
{
  return mask_file_path(root, kind, camera_id, frame_index);
}

std::optional<LabelMask> Dataset::load_mask(MaskKind kind, int camera_id, int frame_index) const
{
  const auto path = mask_path(kind, camera_id, frame_index);
  if (!fs::exists(path)) return std::nullopt;
  auto mask = obstacle_forge::load_mask(path);
  mask.kind = kind;
  mask.camera_id = camera_id;
  mask.frame_index = frame_index;
  return mask;
}

const CameraFrame & Dataset::closest_camera_frame(int camera_id, double t) const
{
  const auto & frames = camera_frames.at(camera_id - 1);
  if (frames.empty()) {
    fail(ErrorKind::kValidation, "camera " + std::to_string(camera_id) + " has no frames");
  }
  const auto it = std::lower_bound(
    frames.begin(), frames.end(), t, [](const CameraFrame & f, double value) { return f.timestamp < value; });
  if (it == frames.begin()) return *it;
  if (it == frames.end()) return frames.back();
  const auto prev = it - 1;
  return (t - prev->timestamp) <= (it->timestamp - t) ? *prev : *it;
}

Dataset load_dataset(const fs::path & root)
{
  if (!fs::is_directory(root)) {
    fail(ErrorKind::kNotFound, "dataset directory not found: " + path_str(root));
  }
  Dataset ds;
  ds.root = root;
  ds.manifest = load_manifest(root / "manifest.json");
  auto calib = load_calibration(root / "calibration.json");
  ds.cameras = std::move(calib.cameras);
  ds.ego_from_lidar = calib.ego_from_lidar;
  if (static_cast<int>(ds.cameras.size()) != ds.manifest.camera_count) {
    fail(ErrorKind::kValidation, "calibration.json: camera count does not match manifest camera_count");
  }
  ds.poses = load_poses(root / "poses.csv");
  if (ds.poses.empty()) {
    fail(ErrorKind::kValidation, path_str(root / "poses.csv") + ": no poses");
  }
  const double span_lo = ds.poses.front().timestamp;
  const double span_hi = ds.poses.back().timestamp;

  for (int cam = 1; cam <= ds.manifest.camera_count; ++cam) {
    std::vector<CameraFrame> frames;
    const auto & times = ds.manifest.camera_times[cam - 1];
    for (std::size_t i = 0; i < times.size(); ++i) {
      const int frame = static_cast<int>(i) + 1;
      frames.push_back({cam, frame, times[i], (fs::path("images") / camera_dir(cam) / frame_file(frame, ".png")).string()});
      if (times[i] < span_lo || times[i] > span_hi) {
        fail(ErrorKind::kValidation, "manifest.json: camera_times outside the pose span");
      }
    }
    ds.camera_frames.push_back(std::move(frames));
  }
  for (double t : ds.manifest.frame_times) {
    if (t < span_lo || t > span_hi) {
      fail(ErrorKind::kValidation, "manifest.json: frame_times outside the pose span");
    }
  }

  for (int i = 1; i <= ds.manifest.frame_count; ++i) {
    const auto path = lidar_file_path(root, i);
    const auto cloud = obstacle_forge::load_point_cloud(path, i);
    LidarFrameInfo info{i, path, cloud.size(), 0.0, 0.0};
    if (!cloud.empty()) {
      const auto [lo, hi] = std::minmax_element(
        cloud.points.begin(), cloud.points.end(),
        [](const Point & a, const Point & b) { return a.timestamp < b.timestamp; });
      info.first_timestamp = lo->timestamp;
      info.last_timestamp = hi->timestamp;
      if (info.first_timestamp < span_lo || info.last_timestamp > span_hi) {
        fail(
          ErrorKind::kValidation,
          path_str(path) + ": timestamp outside the pose span [" + format_double(span_lo) + ", " +
            format_double(span_hi) + "]");
      }
    }
    ds.lidar_frames.push_back(std::move(info));
  }

  const auto instances = root / "masks" / "instances.csv";
  if (fs::exists(instances)) {
    ds.instance_classes = load_instance_classes(instances);
  }

  // Header-check every mask file present.
  for (MaskKind kind : {MaskKind::kRoad, MaskKind::kInstance, MaskKind::kObstacleCandidate}) {
    for (int cam = 1; cam <= ds.manifest.camera_count; ++cam) {
      const auto dir = root / "masks" / to_string(kind) / camera_dir(cam);
      if (!fs::is_directory(dir)) continue;
      const auto & calib_cam = ds.cameras[cam - 1];
      for (const auto & entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".pgm") continue;
        const auto stem = entry.path().stem().string();
        int frame = 0;
        const auto res = std::from_chars(stem.data(), stem.data() + stem.size(), frame);
        if (res.ec != std::errc() || res.ptr != stem.data() + stem.size() || frame < 1 ||
            frame > ds.manifest.frame_count) {
          fail(ErrorKind::kValidation, path_str(entry.path()) + ": mask file name is not a valid frame index");
        }
        std::ifstream in(entry.path(), std::ios::binary);
        const auto h = read_pgm_header(in, entry.path());
        if (h.width != calib_cam.width || h.height != calib_cam.height) {
          fail(ErrorKind::kValidation, path_str(entry.path()) + ": mask dimensions do not match camera calibration");
        }
        const auto expected = static_cast<std::uintmax_t>(h.data_offset) +
                              static_cast<std::uintmax_t>(h.width) * h.height * (h.maxval > 255 ? 2 : 1);
        if (fs::file_size(entry.path()) != expected) {
          fail(ErrorKind::kParse, path_str(entry.path()) + ": graymap payload size mismatch");
        }
      }
    }
  }
  return ds;
}

}  // namespace obstacle_forge
