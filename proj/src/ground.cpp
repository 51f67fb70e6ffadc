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

#include "obstacle_forge/ground.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>

#include "obstacle_forge/random.hpp"

namespace obstacle_forge
{

namespace
{

struct Plane
{
  Eigen::Vector3d normal{Eigen::Vector3d::UnitZ()};  // unit, normal.z() > 0
  double offset{0.0};                                // normal . p + offset = 0

  double signed_distance(const Eigen::Vector3d & p) const { return normal.dot(p) + offset; }
  double distance(const Eigen::Vector3d & p) const { return std::abs(signed_distance(p)); }
};

/// Consensus score: inlier count, with any plane that has more than a small
/// tolerance of points clearly below it ranked under every plane that does
/// not. A dense elevated surface cannot outvote the ground beneath it.
std::ptrdiff_t plane_score(
  std::span<const Eigen::Vector3d> points, const std::vector<std::size_t> & tile, const Plane & plane, double inlier_m)
{
  std::ptrdiff_t inliers = 0;
  std::ptrdiff_t below = 0;
  for (auto i : tile) {
    const double d = plane.signed_distance(points[i]);
    if (std::abs(d) <= inlier_m) {
      ++inliers;
    } else if (d < -inlier_m) {
      ++below;
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(tile.size());
  const std::ptrdiff_t allowed = std::max<std::ptrdiff_t>(2, n / 100);
  return inliers - (n + 1) * std::max<std::ptrdiff_t>(0, below - allowed);
}

std::optional<Plane> plane_through(const Eigen::Vector3d & a, const Eigen::Vector3d & b, const Eigen::Vector3d & c)
{
  Eigen::Vector3d n = (b - a).cross(c - a);
  const double norm = n.norm();
  if (norm < 1e-9) return std::nullopt;
  n /= norm;
  if (n.z() < 0.0) n = -n;
  return Plane{n, -n.dot(a)};
}

std::optional<Plane> fit_plane(std::span<const Eigen::Vector3d> points, std::span<const std::size_t> subset)
{
  if (subset.size() < 3) return std::nullopt;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto i : subset) mean += points[i];
  mean /= static_cast<double>(subset.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto i : subset) {
    const Eigen::Vector3d d = points[i] - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  if (eig.info() != Eigen::Success) return std::nullopt;
  Eigen::Vector3d n = eig.eigenvectors().col(0);
  if (n.z() < 0.0) n = -n;
  return Plane{n, -n.dot(mean)};
}

void split_tile(
  std::span<const Eigen::Vector3d> points, const std::vector<std::size_t> & tile, const GroundParams & params,
  std::uint64_t seed, std::vector<std::uint8_t> & is_ground)
{
  if (tile.size() < 3) return;
  const double min_nz = std::cos(params.max_tilt_deg * std::numbers::pi / 180.0);
  SplitMix rng(seed);

  std::optional<Plane> best;
  std::ptrdiff_t best_score = std::numeric_limits<std::ptrdiff_t>::min();
  for (int it = 0; it < params.ransac_iterations; ++it) {
    const std::size_t a = tile[rng.below(tile.size())];
    const std::size_t b = tile[rng.below(tile.size())];
    const std::size_t c = tile[rng.below(tile.size())];
    if (a == b || b == c || a == c) continue;
    const auto plane = plane_through(points[a], points[b], points[c]);
    if (!plane || plane->normal.z() < min_nz) continue;
    const std::ptrdiff_t score = plane_score(points, tile, *plane, params.inlier_m);
    if (score > best_score) {
      best_score = score;
      best = plane;
      if (score == static_cast<std::ptrdiff_t>(tile.size())) break;
    }
  }
  // Deterministic candidate through the lowest points of the tile.
  if (tile.size() >= 10) {
    std::vector<std::size_t> lowest(tile.begin(), tile.end());
    const std::size_t k = std::max<std::size_t>(3, lowest.size() / 10);
    std::nth_element(lowest.begin(), lowest.begin() + static_cast<std::ptrdiff_t>(k), lowest.end(),
                     [&](std::size_t a, std::size_t b) {
                       return std::make_pair(points[a].z(), a) < std::make_pair(points[b].z(), b);
                     });
    lowest.resize(k);
    std::sort(lowest.begin(), lowest.end());
    if (const auto plane = fit_plane(points, lowest); plane && plane->normal.z() >= min_nz) {
      const std::ptrdiff_t score = plane_score(points, tile, *plane, params.inlier_m);
      if (score > best_score) {
        best_score = score;
        best = plane;
      }
    }
  }
  // Exhaustive fallback for tiny tiles where random draws may all collide.
  if (!best && tile.size() <= 8) {
    for (std::size_t i = 0; i < tile.size(); ++i)
      for (std::size_t j = i + 1; j < tile.size(); ++j)
        for (std::size_t k = j + 1; k < tile.size(); ++k) {
          const auto plane = plane_through(points[tile[i]], points[tile[j]], points[tile[k]]);
          if (!plane || plane->normal.z() < min_nz) continue;
          const std::ptrdiff_t score = plane_score(points, tile, *plane, params.inlier_m);
          if (score > best_score) {
            best_score = score;
            best = plane;
          }
        }
  }
  if (!best) return;

  std::vector<std::size_t> inliers;
  for (auto i : tile) {
    if (best->distance(points[i]) <= params.inlier_m) inliers.push_back(i);
  }
  // Least-squares refinement on the consensus set, kept only if it does not
  // lower the score or violate the tilt limit.
  if (const auto refined = fit_plane(points, inliers); refined && refined->normal.z() >= min_nz) {
    if (plane_score(points, tile, *refined, params.inlier_m) >= best_score) best = refined;
  }
  for (auto i : tile) {
    if (best->distance(points[i]) <= params.inlier_m) is_ground[i] = 1;
  }
}

}  // namespace

GroundSplit segment_ground(std::span<const Eigen::Vector3d> points, const GroundParams & params)
{
  std::map<CellKey, std::vector<std::size_t>> tiles;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CellKey key{
      static_cast<int>(std::floor(points[i].x() / params.tile_m)),
      static_cast<int>(std::floor(points[i].y() / params.tile_m))};
    tiles[key].push_back(i);
  }
  std::vector<std::uint8_t> is_ground(points.size(), 0);
  for (const auto & [key, tile] : tiles) {
    const auto seed = hash_key(
      {static_cast<std::uint64_t>(static_cast<std::int64_t>(key.first)),
       static_cast<std::uint64_t>(static_cast<std::int64_t>(key.second)), tile.size()});
    split_tile(points, tile, params, seed, is_ground);
  }
  GroundSplit split;
  for (std::size_t i = 0; i < points.size(); ++i) {
    (is_ground[i] ? split.ground_indices : split.nonground_indices).push_back(i);
  }
  return split;
}

GroundSplit segment_ground(const PointCloud & cloud, const GroundParams & params)
{
  const auto pts = positions(cloud);
  return segment_ground(std::span<const Eigen::Vector3d>(pts), params);
}

// ---------------------------------------------------------------------------

CellKey RoadWorldModel::key_of(double x, double y) const
{
  return {static_cast<int>(std::floor(x / cell_m_)), static_cast<int>(std::floor(y / cell_m_))};
}

Eigen::Vector2d RoadWorldModel::cell_center(const CellKey & key) const
{
  return {(key.first + 0.5) * cell_m_, (key.second + 0.5) * cell_m_};
}

void RoadWorldModel::add_point(const Eigen::Vector3d & p, int frame_index)
{
  auto & cell = cells_[key_of(p.x(), p.y())];
  cell.points.push_back(p);
  if (cell.frames.empty() || cell.frames.back() != frame_index) {
    const auto it = std::lower_bound(cell.frames.begin(), cell.frames.end(), frame_index);
    if (it == cell.frames.end() || *it != frame_index) cell.frames.insert(it, frame_index);
  }
}

void RoadWorldModel::accumulate(
  std::span<const Eigen::Vector3d> world_points, std::span<const std::uint8_t> in_road, int frame_index)
{
  const std::size_t n = std::min(world_points.size(), in_road.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (in_road[i]) add_point(world_points[i], frame_index);
  }
}

const RoadCell * RoadWorldModel::find(const CellKey & key) const
{
  const auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

std::size_t RoadWorldModel::cell_count(const CellKey & key) const
{
  const auto * cell = find(key);
  return cell ? cell->count() : 0;
}

bool RoadWorldModel::occupied_near(double x, double y, double radius) const
{
  const int reach = static_cast<int>(std::ceil(radius / cell_m_)) + 1;
  const CellKey c = key_of(x, y);
  for (int di = -reach; di <= reach; ++di) {
    for (int dj = -reach; dj <= reach; ++dj) {
      const CellKey k{c.first + di, c.second + dj};
      if (!find(k)) continue;
      if ((cell_center(k) - Eigen::Vector2d(x, y)).norm() <= radius) return true;
    }
  }
  return false;
}

std::optional<std::pair<Eigen::Vector2d, Eigen::Vector2d>> RoadWorldModel::bounds() const
{
  if (cells_.empty()) return std::nullopt;
  Eigen::Vector2d lo = cell_center(cells_.begin()->first);
  Eigen::Vector2d hi = lo;
  for (const auto & [key, cell] : cells_) {
    lo = lo.cwiseMin(cell_center(key));
    hi = hi.cwiseMax(cell_center(key));
  }
  const Eigen::Vector2d half = Eigen::Vector2d::Constant(0.5 * cell_m_);
  return std::make_pair(lo - half, hi + half);
}

// ---------------------------------------------------------------------------

double SurfaceFit::evaluate(double x, double y) const
{
  const double dx = x - origin.x();
  const double dy = y - origin.y();
  const auto & c = coefficients;
  return c(0) + c(1) * dx + c(2) * dy + c(3) * dx * dx + c(4) * dx * dy + c(5) * dy * dy;
}

std::optional<SurfaceFit> fit_quadratic_surface(std::span<const Eigen::Vector3d> points, const Eigen::Vector2d & origin)
{
  if (points.size() < 6) return std::nullopt;
  Eigen::MatrixXd a(points.size(), 6);
  Eigen::VectorXd z(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = points[i].x() - origin.x();
    const double dy = points[i].y() - origin.y();
    a.row(static_cast<Eigen::Index>(i)) << 1.0, dx, dy, dx * dx, dx * dy, dy * dy;
    z(static_cast<Eigen::Index>(i)) = points[i].z();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < 6) return std::nullopt;
  SurfaceFit fit;
  fit.coefficients = qr.solve(z);
  fit.origin = origin;
  return fit;
}

std::map<CellKey, double> cell_residuals(const RoadWorldModel & model, double inlier_band)
{
  constexpr int kMaxRefits = 10;
  std::map<CellKey, double> residuals;
  std::vector<Eigen::Vector3d> ring;
  std::vector<const Eigen::Vector3d *> window;
  std::vector<Eigen::Vector3d> inliers;
  std::vector<std::uint8_t> mask;
  std::vector<std::uint8_t> next;
  for (const auto & [key, cell] : model.cells()) {
    if (cell.points.empty()) continue;
    // Initial surface from the 5x5 neighbourhood minus the inner 3x3 block,
    // so a compact bump cannot pull the fit towards itself.
    ring.clear();
    window.clear();
    for (int di = -2; di <= 2; ++di) {
      for (int dj = -2; dj <= 2; ++dj) {
        const auto * other = model.find({key.first + di, key.second + dj});
        if (other == nullptr) continue;
        for (const auto & p : other->points) window.push_back(&p);
        if (std::max(std::abs(di), std::abs(dj)) == 2) ring.insert(ring.end(), other->points.begin(), other->points.end());
      }
    }
    const Eigen::Vector2d origin = model.cell_center(key);
    auto fit = fit_quadratic_surface(ring, origin);
    if (!fit) continue;
    // Trimmed refits over the whole neighbourhood.
    if (inlier_band > 0.0) {
      mask.assign(window.size(), 0);
      for (int round = 0; round < kMaxRefits; ++round) {
        next.assign(window.size(), 0);
        inliers.clear();
        for (std::size_t k = 0; k < window.size(); ++k) {
          const Eigen::Vector3d & p = *window[k];
          if (std::abs(p.z() - fit->evaluate(p.x(), p.y())) <= inlier_band) {
            next[k] = 1;
            inliers.push_back(p);
          }
        }
        if (next == mask) break;
        const auto refit = fit_quadratic_surface(inliers, origin);
        if (!refit) break;
        fit = refit;
        mask.swap(next);
      }
    }
    double sum = 0.0;
    for (const auto & p : cell.points) sum += std::abs(p.z() - fit->evaluate(p.x(), p.y()));
    residuals[key] = sum / static_cast<double>(cell.points.size());
  }
  return residuals;
}

std::vector<AnomalyCluster> detect_anomalies(const RoadWorldModel & model, const AnomalyParams & params)
{
  const auto residuals = cell_residuals(model, 0.5 * params.residual_threshold);
  std::map<CellKey, bool> anomalous;
  for (const auto & [key, r] : residuals) {
    if (r > params.residual_threshold) anomalous[key] = false;  // false = not yet visited
  }
  std::vector<AnomalyCluster> clusters;
  for (auto & [start, visited] : anomalous) {
    if (visited) continue;
    visited = true;
    std::vector<CellKey> component{start};
    for (std::size_t head = 0; head < component.size(); ++head) {
      const CellKey c = component[head];
      const CellKey neighbours[4] = {
        {c.first + 1, c.second}, {c.first - 1, c.second}, {c.first, c.second + 1}, {c.first, c.second - 1}};
      for (const auto & nb : neighbours) {
        const auto it = anomalous.find(nb);
        if (it == anomalous.end() || it->second) continue;
        it->second = true;
        component.push_back(nb);
      }
    }
    if (component.size() < params.min_cells) continue;
    std::sort(component.begin(), component.end());
    AnomalyCluster cluster;
    cluster.cells = component;
    for (const auto & key : component) {
      const auto * cell = model.find(key);
      cluster.points.insert(cluster.points.end(), cell->points.begin(), cell->points.end());
      cluster.frames.insert(cluster.frames.end(), cell->frames.begin(), cell->frames.end());
    }
    std::sort(cluster.frames.begin(), cluster.frames.end());
    cluster.frames.erase(std::unique(cluster.frames.begin(), cluster.frames.end()), cluster.frames.end());
    for (const auto & p : cluster.points) cluster.centroid += p;
    cluster.centroid /= static_cast<double>(cluster.points.size());
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace obstacle_forge
