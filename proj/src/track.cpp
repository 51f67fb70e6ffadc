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

#include "obstacle_forge/track.hpp"

#include <algorithm>
#include <tuple>

namespace obstacle_forge
{

namespace
{

Eigen::Vector3d mean_of(std::span<const Eigen::Vector3d> pts)
{
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  if (pts.empty()) return c;
  for (const auto & p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

}  // namespace

const char * to_string(DetectionSource source)
{
  switch (source) {
    case DetectionSource::kInstance:
      return "instance";
    case DetectionSource::kObstacleMask:
      return "obstacle_mask";
    case DetectionSource::kAnomaly:
      return "anomaly";
  }
  return "?";
}

Eigen::Vector3d ClusterObservation::centroid() const { return mean_of(points); }

const Observation * Track::at_frame(int frame_index) const
{
  auto it = std::lower_bound(
    observations.begin(), observations.end(), frame_index,
    [](const Observation & o, int f) { return o.frame_index < f; });
  return it != observations.end() && it->frame_index == frame_index ? &*it : nullptr;
}

Eigen::Vector2d Track::velocity_estimate(std::size_t window) const
{
  const std::size_t n = observations.size();
  if (n < 2 || window < 2) return Eigen::Vector2d::Zero();
  const Observation & first = observations[n - std::min(n, window)];
  const Observation & last = observations.back();
  const double dt = last.timestamp - first.timestamp;
  if (!(dt > 0.0)) return Eigen::Vector2d::Zero();
  return (last.centroid - first.centroid).head<2>() / dt;
}

Eigen::Vector3d Track::predict(double timestamp) const
{
  const Observation & last = observations.back();
  const Eigen::Vector2d v = velocity_estimate();
  return last.centroid + Eigen::Vector3d(v.x(), v.y(), 0.0) * (timestamp - last.timestamp);
}

void Track::rebuild_aggregate()
{
  aggregate.clear();
  for (const auto & o : observations) {
    for (const auto & p : o.points) aggregate.push_back(o.alignment * p);
  }
}

Assignment associate(
  std::span<const Eigen::Vector3d> predicted, std::span<const std::int64_t> track_ids,
  std::span<const Eigen::Vector3d> clusters, double gate)
{
  if (!(gate > 0.0)) fail(ErrorKind::kValidation, "associate: gate must be positive");
  if (predicted.size() != track_ids.size()) fail(ErrorKind::kInternal, "associate: id/prediction size mismatch");
  struct Candidate
  {
    double d;
    std::int64_t id;
    std::size_t cluster;
    std::size_t slot;
  };
  std::vector<Candidate> cands;
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double d = (predicted[t].head<2>() - clusters[c].head<2>()).norm();
      if (d < gate) cands.push_back({d, track_ids[t], c, t});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate & a, const Candidate & b) {
    return std::tie(a.d, a.id, a.cluster) < std::tie(b.d, b.id, b.cluster);
  });
  std::vector<std::uint8_t> track_used(predicted.size(), 0);
  std::vector<std::uint8_t> cluster_used(clusters.size(), 0);
  Assignment out;
  for (const auto & c : cands) {
    if (track_used[c.slot] || cluster_used[c.cluster]) continue;
    track_used[c.slot] = 1;
    cluster_used[c.cluster] = 1;
    out.pairs.emplace_back(c.slot, c.cluster);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    if (!track_used[t]) out.unmatched_tracks.push_back(t);
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (!cluster_used[c]) out.unmatched_clusters.push_back(c);
  }
  return out;
}

Tracker::Tracker(DetectionSource source, const TrackerConfig & config, IdAllocator & ids)
: source_(source), config_(config), ids_(ids)
{
  if (!(config.gate_m > 0.0) || config.max_miss < 0 || !(config.static_speed_mps >= 0.0)) {
    fail(ErrorKind::kValidation, "tracker: gate_m > 0, max_miss >= 0, static_speed_mps >= 0 required");
  }
  config.gicp.validate();
}

void Tracker::step(int frame_index, double timestamp, std::vector<ClusterObservation> clusters, double gate)
{
  if (frame_index <= last_frame_) fail(ErrorKind::kInternal, "tracker: frames must be stepped in increasing order");
  last_frame_ = frame_index;
  std::vector<Eigen::Vector3d> predicted;
  std::vector<std::int64_t> ids;
  for (const auto & t : active_) {
    predicted.push_back(t.predict(timestamp));
    ids.push_back(t.id);
  }
  std::vector<Eigen::Vector3d> centroids;
  for (const auto & c : clusters) centroids.push_back(c.centroid());
  const Assignment a = associate(predicted, ids, centroids, gate);

  for (const auto & [slot, ci] : a.pairs) {
    merge(active_[slot], frame_index, timestamp, std::move(clusters[ci]));
    active_[slot].misses = 0;
  }
  for (std::size_t slot : a.unmatched_tracks) ++active_[slot].misses;

  std::vector<Track> still;
  for (auto & t : active_) {
    if (t.misses > config_.max_miss) {
      t.terminated = true;
      done_.push_back(std::move(t));
    } else {
      still.push_back(std::move(t));
    }
  }
  active_ = std::move(still);
  for (std::size_t ci : a.unmatched_clusters) spawn(frame_index, timestamp, std::move(clusters[ci]));
}

void Tracker::merge(Track & track, int frame_index, double timestamp, ClusterObservation && cluster)
{
  Observation obs;
  obs.frame_index = frame_index;
  obs.timestamp = timestamp;
  obs.centroid = cluster.centroid();
  obs.projected = cluster.projected;
  obs.class_votes = std::move(cluster.class_votes);

  const Eigen::Vector2d v = track.velocity_estimate();
  if (v.norm() > config_.static_speed_mps) {
    const std::size_t need = config_.gicp.k_neighbors + 1;
    const Observation & last = track.observations.back();
    const Eigen::Vector3d shift(v.x(), v.y(), 0.0);
    const RigidTransform initial =
      last.alignment * RigidTransform::from_translation(-shift * (timestamp - last.timestamp));
    bool aligned = false;
    if (cluster.points.size() >= need && track.aggregate.size() >= need) {
      const GicpResult r = gicp(cluster.points, track.aggregate, config_.gicp, initial);
      if (r.converged) {
        obs.alignment = r.transform;
        aligned = true;
      }
    }
    if (!aligned) obs.alignment = initial;
    obs.low_confidence = !aligned;
  }
  for (const auto & p : cluster.points) track.aggregate.push_back(obs.alignment * p);
  obs.points = std::move(cluster.points);
  track.observations.push_back(std::move(obs));
}

void Tracker::spawn(int frame_index, double timestamp, ClusterObservation && cluster)
{
  Track t;
  t.id = ids_.next();
  t.source = source_;
  t.class_label = source_ == DetectionSource::kInstance ? kUnknownClass : kObstacleClass;
  Observation obs;
  obs.frame_index = frame_index;
  obs.timestamp = timestamp;
  obs.centroid = cluster.centroid();
  obs.projected = cluster.projected;
  obs.class_votes = std::move(cluster.class_votes);
  t.aggregate = cluster.points;
  obs.points = std::move(cluster.points);
  t.observations.push_back(std::move(obs));
  active_.push_back(std::move(t));
}

std::vector<Track> Tracker::finish()
{
  std::vector<Track> all = std::move(done_);
  for (auto & t : active_) all.push_back(std::move(t));
  active_.clear();
  done_.clear();
  std::sort(all.begin(), all.end(), [](const Track & a, const Track & b) { return a.id < b.id; });
  return all;
}

std::string classify_track(const Track & track, double min_fraction)
{
  std::size_t total = 0;
  std::map<std::string, std::size_t> votes;
  for (const auto & o : track.observations) {
    total += o.projected;
    for (const auto & [label, n] : o.class_votes) votes[label] += n;
  }
  if (total == 0) return kUnknownClass;
  const std::string * best = nullptr;
  std::size_t best_n = 0;
  for (const auto & [label, n] : votes) {
    if (n > best_n) {
      best = &label;
      best_n = n;
    }
  }
  if (best != nullptr && static_cast<double>(best_n) >= min_fraction * static_cast<double>(total)) return *best;
  return kUnknownClass;
}

bool is_closed_set(const std::string & label) { return label != kUnknownClass && label != kObstacleClass; }

std::vector<Track> filter_candidates(
  std::vector<Track> tracks, const CandidateFilter & filter, const RoadWorldModel & road)
{
  std::vector<Track> out;
  for (auto & t : tracks) {
    if (is_closed_set(t.class_label)) {
      out.push_back(std::move(t));
      continue;
    }
    if (t.lifetime() < filter.min_lifetime || t.aggregate.empty()) continue;
    Eigen::Vector3d lo = t.aggregate.front();
    Eigen::Vector3d hi = lo;
    for (const auto & p : t.aggregate) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Eigen::Vector3d ext = hi - lo;
    if (ext.maxCoeff() > filter.max_extent_m) continue;
    const Eigen::Vector3d c = mean_of(t.aggregate);
    const double radius = 0.5 * std::max(ext.x(), ext.y()) + filter.road_margin_m;
    if (!road.occupied_near(c.x(), c.y(), radius)) continue;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace obstacle_forge
