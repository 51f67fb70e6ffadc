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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <vector>

#include "obstacle_forge/eval.hpp"
#include "support.hpp"

namespace of = obstacle_forge;

namespace
{

of::Box3D box(int frame, std::int64_t id, double x, double y, double l = 2.0)
{
  of::Box3D b;
  b.frame_index = frame;
  b.id = id;
  b.x = x;
  b.y = y;
  b.l = l;
  return b;
}

}  // namespace

TEST_SUITE("eval")
{
  TEST_CASE("grid cells")
  {
    CHECK(of::HeatmapGrid::cell_of(0.0, -12.0) == std::make_pair(0, 0));
    CHECK(of::HeatmapGrid::cell_of(15.0, 0.0) == std::make_pair(1, 3));
    CHECK(of::HeatmapGrid::cell_of(99.9, 11.9) == std::make_pair(9, 5));
    CHECK(!of::HeatmapGrid::cell_of(-0.1, 0.0));
    CHECK(!of::HeatmapGrid::cell_of(100.0, 0.0));
    CHECK(!of::HeatmapGrid::cell_of(5.0, 12.0));
    CHECK(!of::HeatmapGrid::cell_of(NAN, 0.0));
  }

  TEST_CASE("greedy matching")
  {
    const std::vector<of::Box3D> gt = {box(1, 1, 10, 0), box(1, 2, 11, 0)};
    const std::vector<of::Box3D> pred = {box(1, 5, 10.6, 0), box(1, 6, 30, 0)};
    const auto m = of::match_frame(gt, pred);
    // Pred 0 is 0.4 from gt 1 and 0.6 from gt 0.
    REQUIRE(m.tp.size() == 1);
    CHECK(m.tp[0] == std::make_pair(std::size_t{1}, std::size_t{0}));
    CHECK(m.fn == std::vector<std::size_t>{0});
    CHECK(m.fp == std::vector<std::size_t>{1});
    // Exactly at the threshold is not a match.
    CHECK(of::match_frame(gt, std::vector<of::Box3D>{box(1, 9, 10, 1.0)}, 1.0).tp.empty());
  }

  TEST_CASE("single frame heatmaps")
  {
    const std::vector<of::Box3D> gt = {box(1, 1, 15, 0, 2.0), box(1, 2, 95, 11)};
    const std::vector<of::Box3D> pred = {box(1, 7, 15.5, 0.25, 2.5), box(1, 8, 55, -10)};
    const auto frames = of::evaluate_frames(gt, pred);
    REQUIRE(frames.size() == 1);
    const auto p = of::precision_heatmap(frames);
    const auto r = of::recall_heatmap(frames);
    CHECK(p.at(1, 3) == 1.0);
    CHECK(p.at(5, 0) == 0.0);
    CHECK(!p.at(9, 5));
    CHECK(r.at(1, 3) == 1.0);
    CHECK(r.at(9, 5) == 0.0);
    CHECK(!r.at(5, 0));
    const auto [lon, lat] = of::displacement_heatmaps(frames);
    CHECK(lon.at(1, 3) == 0.5);
    CHECK(lat.at(1, 3) == 0.25);
    CHECK(!lon.at(9, 5));
    const auto ext = of::extent_heatmaps(frames);
    CHECK(ext[0].at(1, 3) == 0.5);
    CHECK(ext[1].at(1, 3) == 0.0);
    const auto s = of::summarize(frames);
    CHECK(s.tp == 1);
    CHECK(s.fp == 1);
    CHECK(s.fn == 1);
    CHECK(s.precision == 0.5);
    CHECK(s.recall == 0.5);
    CHECK(s.mean_long_disp == 0.5);
    const auto near = of::summarize(frames, 60.0);
    CHECK(near.fn == 0);
    CHECK(near.recall == 1.0);
  }

  TEST_CASE("metrics stay in range on random frames")
  {
    std::mt19937_64 rng(31);
    std::vector<of::Box3D> gt;
    std::vector<of::Box3D> pred;
    for (int f = 1; f <= 20; ++f) {
      for (int k = 0; k < 6; ++k) {
        const double x = of_test::uniform(rng, 1, 99);
        const double y = of_test::uniform(rng, -12, 12);
        gt.push_back(box(f, k, x, y));
        if (rng() % 3 != 0) pred.push_back(box(f, 10 + static_cast<int>(rng() % 8), x + of_test::uniform(rng, -1, 1), y));
        if (rng() % 4 == 0) pred.push_back(box(f, 50, of_test::uniform(rng, 0, 100), of_test::uniform(rng, -12, 12)));
      }
    }
    const auto frames = of::evaluate_frames(gt, pred);
    for (const auto & grid : {of::precision_heatmap(frames), of::recall_heatmap(frames)}) {
      for (const auto & v : grid.values) {
        if (v) CHECK((*v >= 0.0 && *v <= 1.0));
      }
    }
    const auto [lon, lat] = of::displacement_heatmaps(frames);
    for (const auto & v : lon.values) {
      if (v) CHECK((*v >= 0.0 && *v < 1.0));
    }
    const auto s = of::summarize(frames);
    std::size_t matched = 0;
    for (const auto & f : frames) matched += f.match.tp.size();
    CHECK(s.tp == matched);
    CHECK(s.tp_pred == matched);
    CHECK(s.tp + s.fn == gt.size());
    CHECK(s.tp_pred + s.fp == pred.size());
  }

  TEST_CASE("id changes")
  {
    std::vector<of::Box3D> gt;
    std::vector<of::Box3D> pred;
    const std::int64_t ids[] = {5, 5, 6, 6, 5};
    for (int f = 1; f <= 5; ++f) {
      gt.push_back(box(f, 1, 25, 0));
      pred.push_back(box(f, ids[f - 1], 25.1, 0));
    }
    const auto frames = of::evaluate_frames(gt, pred);
    const auto g = of::track_id_change_heatmap(frames);
    CHECK(g.at(2, 3) == 2.0);
    CHECK(g.at(0, 0) == 0.0);
    CHECK(of::summarize(frames).id_changes == 2);
  }

  TEST_CASE("heatmap output")
  {
    of::HeatmapGrid g;
    CHECK(of::heatmap_pixels(g) == std::vector<std::uint8_t>(60, 0));
    g.at(0, 0) = 0.5;
    g.at(0, 1) = 0.5;
    CHECK(of::heatmap_pixels(g) == std::vector<std::uint8_t>(60, 0));
    g.at(9, 5) = 1.5;
    const auto px = of::heatmap_pixels(g);
    CHECK(px[0] == 0);
    CHECK(px[59] == 255);
    const std::string csv = of::heatmap_csv(g);
    CHECK(csv.rfind("0.500000,0.500000,none,none,none,none\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

    const auto dir = of_test::scratch_dir("heatmap");
    of::write_heatmap(g, dir / "g.csv", dir / "g.pgm");
    std::ifstream in(dir / "g.pgm", std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(bytes.rfind("P5\n6 10\n255\n", 0) == 0);
    CHECK(bytes.size() == std::string("P5\n6 10\n255\n").size() + 60);
  }

  TEST_CASE("ego frame conversion")
  {
    of::Box3D b = box(2, 1, 10, 0);
    b.velocity = {1, 0};
    const std::vector<of::RigidTransform> t = {of::RigidTransform::identity(),
                                               of::RigidTransform::from_yaw(std::numbers::pi / 2, {0, 0, 1})};
    const auto e = of::to_ego_frame(std::vector<of::Box3D>{b}, t);
    CHECK(e[0].center().isApprox(Eigen::Vector3d(0, 10, 1), 1e-12));
    CHECK(e[0].velocity.isApprox(Eigen::Vector2d(0, 1)));
    CHECK(e[0].theta == doctest::Approx(std::numbers::pi / 2));
    CHECK_THROWS(of::to_ego_frame(std::vector<of::Box3D>{box(3, 1, 0, 0)}, t));
  }
}
