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
#include <numeric>
#include <random>
#include <vector>

#include "obstacle_forge/ground.hpp"
#include "obstacle_forge/synthgen.hpp"
#include "support.hpp"

namespace of = obstacle_forge;

namespace
{

double quadratic_height(double x, double y, const void *) { return of_test::quadratic_road(x, y); }

double flat_height(double, double, const void *) { return 0.0; }

double bump_height(double x, double y, const void * ctx)
{
  return static_cast<const of::BumpSpec *>(ctx)->height_at(x, y);
}

}  // namespace

TEST_SUITE("ground")
{
  TEST_CASE("flat road with a box: ground and obstacle separate")
  {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<Eigen::Vector3d> pts;
    std::vector<bool> is_ground;
    for (int i = 0; i < 4000; ++i) {
      pts.emplace_back(of_test::uniform(rng, 2, 40), of_test::uniform(rng, -10, 10), -1.8 + noise(rng));
      is_ground.push_back(true);
    }
    for (int i = 0; i < 300; ++i) {
      pts.emplace_back(of_test::uniform(rng, 15, 16), of_test::uniform(rng, 0, 1), of_test::uniform(rng, -1.5, -0.6));
      is_ground.push_back(false);
    }
    const auto split = of::segment_ground(pts);
    // Exact partition.
    std::vector<std::size_t> all(split.ground_indices);
    all.insert(all.end(), split.nonground_indices.begin(), split.nonground_indices.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(pts.size());
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);
    CHECK(std::is_sorted(split.ground_indices.begin(), split.ground_indices.end()));
    std::size_t wrong = 0;
    for (std::size_t i : split.ground_indices) wrong += is_ground[i] ? 0 : 1;
    for (std::size_t i : split.nonground_indices) wrong += is_ground[i] ? 1 : 0;
    CHECK(wrong < 20);
  }

  TEST_CASE("steep tiles and tiny tiles are non-ground")
  {
    std::vector<Eigen::Vector3d> wall;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) wall.emplace_back(20.0 + 0.01 * i, 0.3 * j, 0.3 * i + 0.05 * j);
    }
    wall.emplace_back(40.0, 40.0, 0.0);
    const auto split = of::segment_ground(wall);
    CHECK(split.ground_indices.empty());
    CHECK(split.nonground_indices.size() == wall.size());
  }

  TEST_CASE("quadratic surface fit is exact on a quadratic")
  {
    std::vector<Eigen::Vector3d> pts;
    for (double x = 0; x < 3; x += 0.25) {
      for (double y = -1; y < 1; y += 0.25) pts.emplace_back(x, y, of_test::quadratic_road(x, y));
    }
    const auto fit = of::fit_quadratic_surface(pts, {1.0, 0.0});
    REQUIRE(fit.has_value());
    for (const auto & p : pts) CHECK(std::abs(fit->evaluate(p.x(), p.y()) - p.z()) < 1e-9);
    const std::vector<Eigen::Vector3d> few(pts.begin(), pts.begin() + 5);
    CHECK(!of::fit_quadratic_surface(few, {0, 0}).has_value());
    std::vector<Eigen::Vector3d> line;
    for (int i = 0; i < 10; ++i) line.emplace_back(i, 0, 0);
    CHECK(!of::fit_quadratic_surface(line, {0, 0}).has_value());
  }

  TEST_CASE("road model cells")
  {
    of::RoadWorldModel m(0.5);
    CHECK(m.key_of(0.1, -0.1) == of::CellKey{0, -1});
    CHECK(m.cell_center({2, -3}).isApprox(Eigen::Vector2d(1.25, -1.25)));
    const std::vector<Eigen::Vector3d> pts = {{0.1, 0.1, 0}, {0.2, 0.2, 0}, {3.0, 3.0, 0}};
    const std::vector<std::uint8_t> in_road = {1, 1, 0};
    m.accumulate(pts, in_road, 4);
    m.accumulate(pts, in_road, 2);
    CHECK(m.cell_count({0, 0}) == 4);
    CHECK(m.cell_count({6, 6}) == 0);
    REQUIRE(m.find({0, 0}) != nullptr);
    CHECK(m.find({0, 0})->frames == std::vector<int>{2, 4});
    CHECK(m.occupied_near(0.3, 0.3, 0.1));
    CHECK(!m.occupied_near(3.0, 3.0, 0.5));
  }

  TEST_CASE("flat and quadratic roads have no anomalies")
  {
    const auto flat = of_test::lattice_road(0, 10, -3, 3, 0.5, 3, flat_height, nullptr);
    CHECK(of::detect_anomalies(flat).empty());
    const auto quad = of_test::lattice_road(0, 10, -3, 3, 0.5, 3, quadratic_height, nullptr);
    for (const auto & [key, r] : of::cell_residuals(quad)) CHECK(r < 1e-6);
    CHECK(of::detect_anomalies(quad).empty());
  }

  TEST_CASE("bump and hole are found; threshold is monotone")
  {
    of::BumpSpec bump;
    bump.center = {5.25, 0.25};
    bump.half_size = 0.5;
    bump.ramp = 0.25;
    bump.height = 0.3;
    const auto up = of_test::lattice_road(0, 10, -3, 3, 0.5, 4, bump_height, &bump);
    const auto found = of::detect_anomalies(up, {0.15, 2});
    REQUIRE(found.size() == 1);
    CHECK(std::binary_search(found[0].cells.begin(), found[0].cells.end(), of::CellKey{10, 0}));
    CHECK((found[0].centroid.head<2>() - bump.center).norm() < 0.1);
    CHECK(found[0].frames == std::vector<int>{1});

    bump.height = -0.3;
    const auto down = of_test::lattice_road(0, 10, -3, 3, 0.5, 4, bump_height, &bump);
    CHECK(of::detect_anomalies(down, {0.15, 2}).size() == 1);

    std::size_t previous = 0;
    for (double thr : {0.3, 0.2, 0.15, 0.1, 0.05}) {
      std::size_t cells = 0;
      for (const auto & a : of::detect_anomalies(up, {thr, 1})) cells += a.cells.size();
      CHECK(cells >= previous);
      previous = cells;
    }
  }
}
