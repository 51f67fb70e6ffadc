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

#include <doctest.h>

#include <vector>

#include "obstacle_forge/errors.hpp"
#include "obstacle_forge/track.hpp"

namespace of = obstacle_forge;

namespace
{

of::ClusterObservation blob(const Eigen::Vector3d & c, std::size_t projected = 0)
{
  of::ClusterObservation o;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) o.points.push_back(c + Eigen::Vector3d(0.1 * i, 0.1 * j, 0.0));
  }
  o.projected = projected;
  return o;
}

of::Track track_with(std::vector<Eigen::Vector3d> pts, std::size_t lifetime, std::string label = of::kUnknownClass)
{
  of::Track t;
  t.class_label = std::move(label);
  for (std::size_t i = 0; i < lifetime; ++i) {
    of::Observation o;
    o.frame_index = static_cast<int>(i) + 1;
    o.points = pts;
    t.observations.push_back(o);
  }
  t.rebuild_aggregate();
  return t;
}

}  // namespace

TEST_SUITE("track")
{
  TEST_CASE("greedy association with a gate")
  {
    const std::vector<Eigen::Vector3d> pred = {{0, 0, 0}, {1, 0, 0}};
    const std::vector<std::int64_t> ids = {7, 3};
    const std::vector<Eigen::Vector3d> obs = {{0.9, 0, 5}, {0.2, 0, 0}, {30, 0, 0}};
    const auto a = of::associate(pred, ids, obs, 2.0);
    // (slot 1, cluster 0) at 0.1 goes first; slot 0 then takes cluster 1 at 0.2.
    CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}});
    CHECK(a.unmatched_tracks.empty());
    CHECK(a.unmatched_clusters == std::vector<std::size_t>{2});

    const auto none = of::associate(pred, ids, obs, 0.05);
    CHECK(none.pairs.empty());
    CHECK(none.unmatched_tracks.size() == 2);
    CHECK_THROWS_AS(of::associate(pred, ids, obs, 0.0), of::Error);

    // Equal distances resolve to the lower track id.
    const std::vector<Eigen::Vector3d> tie = {{0.5, 0, 0}};
    const auto t = of::associate(pred, ids, tie, 2.0);
    REQUIRE(t.pairs.size() == 1);
    CHECK(t.pairs[0].first == 1);
  }

  TEST_CASE("tracker spawns, follows and terminates")
  {
    of::IdAllocator ids;
    of::TrackerConfig cfg;
    cfg.max_miss = 1;
    of::Tracker tracker(of::DetectionSource::kObstacleMask, cfg, ids);
    for (int f = 1; f <= 4; ++f) {
      std::vector<of::ClusterObservation> clusters = {blob({10, 0, 0})};
      if (f <= 2) clusters.push_back(blob({20, 5, 0}));
      tracker.step(f, 0.1 * f, std::move(clusters), cfg.gate_m);
    }
    CHECK(tracker.active().size() == 1);
    CHECK_THROWS_AS(tracker.step(4, 0.4, {}, 2.0), of::Error);
    const auto all = tracker.finish();
    REQUIRE(all.size() == 2);
    CHECK(all[0].id == 1);
    CHECK(all[0].lifetime() == 4);
    CHECK(all[0].class_label == of::kObstacleClass);
    CHECK(all[0].aggregate.size() == 36);
    CHECK(all[1].lifetime() == 2);
    CHECK(all[1].terminated);
    CHECK(all[0].at_frame(3) != nullptr);
    CHECK(all[1].at_frame(3) == nullptr);
  }

  TEST_CASE("velocity and prediction")
  {
    of::Track t;
    for (int i = 0; i < 4; ++i) {
      of::Observation o;
      o.frame_index = i + 1;
      o.timestamp = 0.5 * i;
      o.centroid = {2.0 * o.timestamp, 1.0, 0.0};
      t.observations.push_back(o);
    }
    CHECK(t.velocity_estimate().isApprox(Eigen::Vector2d(2, 0)));
    CHECK(t.predict(2.5).isApprox(Eigen::Vector3d(5, 1, 0)));
    t.observations.resize(1);
    CHECK(t.velocity_estimate().isZero());
  }

  TEST_CASE("class vote")
  {
    of::Track t;
    of::Observation a;
    a.projected = 10;
    a.class_votes = {{"car", 4}, {"person", 1}};
    of::Observation b;
    b.projected = 10;
    b.class_votes = {{"car", 6}};
    t.observations = {a, b};
    CHECK(of::classify_track(t) == "car");
    CHECK(of::classify_track(t, 0.6) == of::kUnknownClass);
    CHECK(of::classify_track(of::Track{}) == of::kUnknownClass);
    CHECK(of::is_closed_set("car"));
    CHECK(!of::is_closed_set(of::kObstacleClass));
  }

  TEST_CASE("candidate filter")
  {
    of::RoadWorldModel road(0.5);
    road.add_point({10, 0, 0}, 1);
    const std::vector<Eigen::Vector3d> small = {{10, 0, 0}, {10.5, 0.5, 0.5}};
    const std::vector<Eigen::Vector3d> huge = {{10, 0, 0}, {18, 0, 0}};
    const std::vector<Eigen::Vector3d> offroad = {{40, 40, 0}, {40.5, 40.5, 0}};
    std::vector<of::Track> tracks = {track_with(small, 5), track_with(small, 4), track_with(huge, 6),
                                     track_with(offroad, 6), track_with(offroad, 1, "car")};
    for (std::size_t i = 0; i < tracks.size(); ++i) tracks[i].id = static_cast<std::int64_t>(i);
    const auto kept = of::filter_candidates(tracks, {}, road);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == 0);
    CHECK(kept[1].id == 4);
  }
}
