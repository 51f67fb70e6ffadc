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

#include "obstacle_forge/fuse.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "obstacle_forge/geometry2d.hpp"

namespace obstacle_forge
{

namespace
{

constexpr double kMinExtent = 0.01;

struct UnionFind
{
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x)
  {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool should_merge(const Track & a, const Track & b, double merge_dist)
{
  if (a.observations.empty() || b.observations.empty()) return false;
  if (a.last_frame() < b.first_frame() || b.last_frame() < a.first_frame()) return false;
  std::size_t common = 0;
  for (const auto & o : a.observations) {
    const Observation * q = b.at_frame(o.frame_index);
    if (q == nullptr) continue;
    ++common;
    if (!((o.centroid.head<2>() - q->centroid.head<2>()).norm() < merge_dist)) return false;
  }
  return common > 0;
}

bool preferred(const Track & a, const Track & b)
{
  return std::make_tuple(priority(a.source), a.id) < std::make_tuple(priority(b.source), b.id);
}

Track merge_group(std::vector<Track> members)
{
  std::sort(members.begin(), members.end(), preferred);
  Track merged = std::move(members.front());
  std::int64_t lowest = merged.id;
  std::vector<Track> rest(std::make_move_iterator(members.begin() + 1), std::make_move_iterator(members.end()));
  while (!rest.empty()) {
    bool progress = false;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      Track & m = rest[i];
      const Observation * anchor_m = nullptr;
      const Observation * anchor = nullptr;
      for (const auto & o : m.observations) {
        anchor = merged.at_frame(o.frame_index);
        if (anchor != nullptr) {
          anchor_m = &o;
          break;
        }
      }
      if (anchor == nullptr) continue;
      const RigidTransform to_merged = anchor->alignment * anchor_m->alignment.inverse();
      std::vector<Observation> combined;
      combined.reserve(merged.observations.size() + m.observations.size());
      std::size_t a = 0;
      std::size_t b = 0;
      while (a < merged.observations.size() || b < m.observations.size()) {
        if (b >= m.observations.size() ||
            (a < merged.observations.size() && merged.observations[a].frame_index < m.observations[b].frame_index)) {
          combined.push_back(std::move(merged.observations[a++]));
        } else if (a >= merged.observations.size() ||
                   m.observations[b].frame_index < merged.observations[a].frame_index) {
          Observation o = std::move(m.observations[b++]);
          o.alignment = to_merged * o.alignment;
          combined.push_back(std::move(o));
        } else {
          Observation o = std::move(merged.observations[a++]);
          Observation & extra = m.observations[b++];
          // Same frame, same physical object: the extra points share this
          // frame's alignment.
          o.points.insert(o.points.end(), extra.points.begin(), extra.points.end());
          o.projected += extra.projected;
          for (const auto & [label, n] : extra.class_votes) o.class_votes[label] += n;
          o.low_confidence = o.low_confidence && extra.low_confidence;
          combined.push_back(std::move(o));
        }
      }
      merged.observations = std::move(combined);
      lowest = std::min(lowest, m.id);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      progress = true;
      break;
    }
    if (!progress) fail(ErrorKind::kInternal, "resolve_entities: merge group without common frames");
  }
  merged.id = lowest;
  merged.rebuild_aggregate();
  return merged;
}

}  // namespace

std::vector<std::uint8_t> mask_to_clusters(
  std::span<const ObstacleMask2D> masks, int width, int height, const ClusterSet & clusters,
  std::span<const Projection> projections, double overlap_frac)
{
  std::vector<std::uint8_t> tagged(static_cast<std::size_t>(clusters.k), 0);
  if (masks.empty() || clusters.k == 0) return tagged;
  const auto labels = candidate_label_image(masks, width, height);
  const std::size_t n_masks = masks.size();
  // counts[c * (n_masks + 1) + m]: m = 0 counts every in-view point.
  std::vector<std::size_t> counts(static_cast<std::size_t>(clusters.k) * (n_masks + 1), 0);
  for (const auto & p : projections) {
    if (p.point_index >= clusters.labels.size()) continue;
    const int c = clusters.labels[p.point_index];
    if (c < 0) continue;
    const std::size_t row = static_cast<std::size_t>(c) * (n_masks + 1);
    ++counts[row];
    const std::uint16_t m = labels[static_cast<std::size_t>(p.pixel_v()) * width + p.pixel_u()];
    if (m > 0) ++counts[row + m];
  }
  for (std::size_t c = 0; c < tagged.size(); ++c) {
    const std::size_t row = c * (n_masks + 1);
    const std::size_t total = counts[row];
    if (total == 0) continue;
    for (std::size_t m = 1; m <= n_masks; ++m) {
      if (static_cast<double>(counts[row + m]) >= overlap_frac * static_cast<double>(total)) {
        tagged[c] = 1;
        break;
      }
    }
  }
  return tagged;
}

std::vector<Track> resolve_entities(std::vector<Track> tracks, double merge_dist)
{
  if (!(merge_dist > 0.0)) fail(ErrorKind::kValidation, "resolve_entities: merge_dist must be positive");
  std::sort(tracks.begin(), tracks.end(), [](const Track & a, const Track & b) { return a.id < b.id; });
  for (;;) {
    const std::size_t n = tracks.size();
    UnionFind uf(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (should_merge(tracks[i], tracks[j], merge_dist)) {
          uf.unite(i, j);
          any = true;
        }
      }
    }
    if (!any) return tracks;
    std::map<std::size_t, std::vector<Track>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(std::move(tracks[i]));
    std::vector<Track> next;
    for (auto & [root, members] : groups) {
      next.push_back(members.size() == 1 ? std::move(members.front()) : merge_group(std::move(members)));
    }
    std::sort(next.begin(), next.end(), [](const Track & a, const Track & b) { return a.id < b.id; });
    tracks = std::move(next);
  }
}

CuboidFit fit_cuboid(std::span<const Eigen::Vector3d> points)
{
  CuboidFit fit;
  if (points.empty()) {
    fit.fallback = true;
    return fit;
  }
  std::vector<Eigen::Vector2d> bev;
  bev.reserve(points.size());
  double zmin = points.front().z();
  double zmax = zmin;
  for (const auto & p : points) {
    bev.push_back(p.head<2>());
    zmin = std::min(zmin, p.z());
    zmax = std::max(zmax, p.z());
  }
  const OrientedRect r = min_area_rect(bev);
  fit.center = {r.center.x(), r.center.y(), 0.5 * (zmin + zmax)};
  fit.l = r.length;
  fit.w = r.width;
  fit.h = zmax - zmin;
  fit.theta = r.theta;
  fit.fallback = r.degenerate || points.size() < 3;
  return fit;
}

std::vector<Kinematics> estimate_kinematics(std::span<const double> times, std::span<const Eigen::Vector2d> xy)
{
  if (times.size() != xy.size()) fail(ErrorKind::kInternal, "estimate_kinematics: size mismatch");
  const std::size_t n = times.size();
  std::vector<Kinematics> out(n);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    const double dt = times[b] - times[a];
    if (dt > 0.0) out[i].velocity = (xy[b] - xy[a]) / dt;
  }
  if (n < 3) return out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = times[i] - times[i - 1];
    const double h2 = times[i + 1] - times[i];
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    const Eigen::Vector2d s1 = (xy[i] - xy[i - 1]) / h1;
    const Eigen::Vector2d s2 = (xy[i + 1] - xy[i]) / h2;
    out[i].acceleration = 2.0 * (s2 - s1) / (h1 + h2);
  }
  out.front().acceleration = out[1].acceleration;
  out.back().acceleration = out[n - 2].acceleration;
  return out;
}

std::vector<Track> anomaly_tracks(
  std::span<const AnomalyCluster> anomalies, std::span<const double> frame_times, IdAllocator & ids)
{
  std::vector<Track> out;
  for (const auto & a : anomalies) {
    if (a.frames.empty()) continue;
    Track t;
    t.id = ids.next();
    t.source = DetectionSource::kAnomaly;
    t.class_label = kObstacleClass;
    for (int f : a.frames) {
      Observation o;
      o.frame_index = f;
      o.timestamp = f >= 1 && static_cast<std::size_t>(f) <= frame_times.size() ? frame_times[f - 1] : 0.0;
      o.centroid = a.centroid;
      if (t.observations.empty()) o.points = a.points;
      t.observations.push_back(std::move(o));
    }
    t.rebuild_aggregate();
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Box3D> emit_boxes(std::span<const Track> tracks)
{
  std::vector<Box3D> out;
  for (const auto & t : tracks) {
    if (t.observations.empty()) continue;
    const CuboidFit fit = fit_cuboid(t.aggregate);
    std::vector<double> times;
    std::vector<Eigen::Vector2d> centers;
    std::vector<Box3D> boxes;
    for (const auto & o : t.observations) {
      const RigidTransform world_from_aggregate = o.alignment.inverse();
      const Eigen::Vector3d c = world_from_aggregate * fit.center;
      Box3D b;
      b.frame_index = o.frame_index;
      b.id = t.id;
      b.label = t.class_label == kUnknownClass ? std::string(kObstacleClass) : t.class_label;
      b.x = c.x();
      b.y = c.y();
      b.z = c.z();
      b.w = std::max(fit.w, kMinExtent);
      b.h = std::max(fit.h, kMinExtent);
      b.l = std::max(fit.l, kMinExtent);
      b.theta = normalize_angle(fit.theta + world_from_aggregate.yaw());
      boxes.push_back(b);
      times.push_back(o.timestamp);
      centers.push_back(c.head<2>());
    }
    if (t.source != DetectionSource::kAnomaly) {
      const auto kin = estimate_kinematics(times, centers);
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        boxes[i].velocity = kin[i].velocity;
        boxes[i].acceleration = kin[i].acceleration;
      }
    }
    out.insert(out.end(), boxes.begin(), boxes.end());
  }
  std::sort(out.begin(), out.end(), [](const Box3D & a, const Box3D & b) {
    return std::tie(a.frame_index, a.id) < std::tie(b.frame_index, b.id);
  });
  return out;
}

}  // namespace obstacle_forge
