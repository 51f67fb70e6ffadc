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

#include "obstacle_forge/register.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>

#include "obstacle_forge/kdtree.hpp"

namespace obstacle_forge
{

namespace
{

constexpr int kMaxHalvings = 8;

Eigen::Matrix3d skew(const Eigen::Vector3d & v)
{
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d regularized_covariance(
  std::span<const Eigen::Vector3d> points, const KdTree & tree, std::size_t i, std::size_t k, double eps)
{
  const auto nn = tree.knn(points[i], k);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto & n : nn) mean += points[n.index];
  mean /= static_cast<double>(nn.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto & n : nn) {
    const Eigen::Vector3d d = points[n.index] - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(nn.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Matrix3d & v = eig.eigenvectors();  // ascending eigenvalues
  const Eigen::Vector3d spectrum(eps, 1.0, 1.0);
  return v * spectrum.asDiagonal() * v.transpose();
}

struct Pair
{
  std::size_t source;
  std::size_t target;
};

}  // namespace

void GicpConfig::validate() const
{
  if (k_neighbors < 1 || !(cov_epsilon > 0.0) || !(max_corr_dist > 0.0) || max_iterations < 1 ||
      !(trans_tol > 0.0) || !(rot_tol > 0.0) || !(degeneracy_ratio >= 0.0 && degeneracy_ratio < 1.0)) {
    fail(ErrorKind::kValidation, "gicp: invalid configuration");
  }
}

std::vector<Eigen::Matrix3d> estimate_covariances(
  std::span<const Eigen::Vector3d> points, std::size_t k_neighbors, double cov_epsilon)
{
  if (points.size() < k_neighbors + 1) {
    fail(
      ErrorKind::kValidation, "covariance estimation needs at least " + std::to_string(k_neighbors + 1) +
                                " points, got " + std::to_string(points.size()));
  }
  const KdTree tree(points);
  std::vector<Eigen::Matrix3d> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = regularized_covariance(points, tree, i, k_neighbors, cov_epsilon);
  }
  return out;
}

RigidTransform apply_increment(const RigidTransform & t, const Eigen::Matrix<double, 6, 1> & delta)
{
  const Eigen::Vector3d dt = delta.head<3>();
  const Eigen::Vector3d w = delta.tail<3>();
  const double angle = w.norm();
  const Eigen::Matrix3d dr =
    angle > 0.0 ? Eigen::AngleAxisd(angle, w / angle).toRotationMatrix() : Eigen::Matrix3d::Identity();
  const RigidTransform inc(dr, dt);
  const RigidTransform out = inc * t;
  return {orthonormalize(out.rotation()), out.translation()};
}

Eigen::Vector3d gicp_residual(const RigidTransform & t, const Eigen::Vector3d & source, const Eigen::Vector3d & target)
{
  return target - t * source;
}

Eigen::Matrix<double, 3, 6> gicp_jacobian(const RigidTransform & t, const Eigen::Vector3d & source)
{
  Eigen::Matrix<double, 3, 6> j;
  j.leftCols<3>() = -Eigen::Matrix3d::Identity();
  j.rightCols<3>() = skew(t * source);
  return j;
}

namespace
{

template <int N>
Eigen::Matrix<double, N, 1> solve_normal_equations(
  const Eigen::Matrix<double, N, N> & h, const Eigen::Matrix<double, N, 1> & g, double degeneracy_ratio)
{
  if (!(degeneracy_ratio > 0.0)) return -h.ldlt().solve(g);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> eig(h);
  const auto & values = eig.eigenvalues();
  const double floor = degeneracy_ratio * values(N - 1);
  Eigen::Matrix<double, N, 1> delta = Eigen::Matrix<double, N, 1>::Zero();
  for (int i = 0; i < N; ++i) {
    if (!(values(i) > floor) || !(values(i) > 0.0)) continue;
    const auto v = eig.eigenvectors().col(i);
    delta -= v * (v.dot(g) / values(i));
  }
  return delta;
}

Eigen::Matrix<double, 6, 1> solve_step(
  const Eigen::Matrix<double, 6, 6> & h, const Eigen::Matrix<double, 6, 1> & g, const GicpConfig & config)
{
  if (!config.planar) return solve_normal_equations<6>(h, g, config.degeneracy_ratio);
  constexpr std::array<int, 4> kFree{0, 1, 2, 5};
  Eigen::Matrix4d hr;
  Eigen::Vector4d gr;
  for (int a = 0; a < 4; ++a) {
    gr(a) = g(kFree[a]);
    for (int b = 0; b < 4; ++b) hr(a, b) = h(kFree[a], kFree[b]);
  }
  const Eigen::Vector4d dr = solve_normal_equations<4>(hr, gr, config.degeneracy_ratio);
  Eigen::Matrix<double, 6, 1> delta = Eigen::Matrix<double, 6, 1>::Zero();
  for (int a = 0; a < 4; ++a) delta(kFree[a]) = dr(a);
  return delta;
}

GicpResult gicp_centered(
  std::span<const Eigen::Vector3d> source, std::span<const Eigen::Vector3d> target, const GicpConfig & config,
  const RigidTransform & initial)
{
  const auto source_cov = estimate_covariances(source, config.k_neighbors, config.cov_epsilon);
  if (target.size() < config.k_neighbors + 1) {
    fail(
      ErrorKind::kValidation, "gicp target needs at least " + std::to_string(config.k_neighbors + 1) + " points");
  }
  const KdTree target_tree(target);
  // Target covariances are only needed for matched points; computed lazily.
  std::vector<std::optional<Eigen::Matrix3d>> target_cov(target.size());
  auto target_covariance = [&](std::size_t j) -> const Eigen::Matrix3d & {
    if (!target_cov[j]) {
      target_cov[j] = regularized_covariance(target, target_tree, j, config.k_neighbors, config.cov_epsilon);
    }
    return *target_cov[j];
  };

  GicpResult result;
  result.transform = initial;
  const double max_d2 = config.max_corr_dist * config.max_corr_dist;
  std::vector<Pair> pairs;

  std::vector<Eigen::Matrix3d> weights;  // per pair, fixed within an iteration
  auto cost_of = [&](const RigidTransform & t) {
    double cost = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Eigen::Vector3d d = gicp_residual(t, source[pairs[k].source], target[pairs[k].target]);
      cost += d.dot(weights[k] * d);
    }
    return cost;
  };

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    result.iterations = iter + 1;
    pairs.clear();
    for (std::size_t i = 0; i < source.size(); ++i) {
      const auto nn = target_tree.nearest(result.transform * source[i]);
      if (nn.squared_distance <= max_d2) pairs.push_back({i, nn.index});
    }
    if (pairs.empty()) {
      result.converged = false;
      result.failure_reason = "no correspondences within max_corr_dist at iteration " + std::to_string(iter + 1);
      return result;
    }

    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    double cost0 = 0.0;
    const Eigen::Matrix3d & r = result.transform.rotation();
    weights.clear();
    for (const auto & p : pairs) {
      weights.push_back((target_covariance(p.target) + r * source_cov[p.source] * r.transpose()).inverse());
      const Eigen::Matrix3d & m = weights.back();
      const Eigen::Vector3d d = gicp_residual(result.transform, source[p.source], target[p.target]);
      const auto j = gicp_jacobian(result.transform, source[p.source]);
      h += j.transpose() * m * j;
      g += j.transpose() * m * d;
      cost0 += d.dot(m * d);
    }
    Eigen::Matrix<double, 6, 1> delta = solve_step(h, g, config);
    if (!delta.allFinite()) {
      result.final_cost = cost0;
      result.failure_reason = "singular normal equations";
      return result;
    }

    bool accepted = false;
    RigidTransform candidate;
    double cost1 = cost0;
    int halvings = 0;
    for (; halvings <= kMaxHalvings; ++halvings) {
      candidate = apply_increment(result.transform, delta);
      cost1 = cost_of(candidate);
      if (cost1 <= cost0) {
        accepted = true;
        break;
      }
      delta *= 0.5;
    }
    if (!accepted) {
      // No descent along the Gauss-Newton direction: already at the minimum
      // for this correspondence set.
      result.final_cost = cost0;
      result.converged = delta.head<3>().norm() < config.trans_tol && delta.tail<3>().norm() < config.rot_tol;
      if (!result.converged) result.failure_reason = "no descent step found";
      return result;
    }
    result.steps.push_back({cost0, cost1, halvings, pairs.size()});
    result.transform = candidate;
    result.final_cost = cost1;
    if (delta.head<3>().norm() < config.trans_tol && delta.tail<3>().norm() < config.rot_tol) {
      result.converged = true;
      return result;
    }
  }
  result.failure_reason = "iteration limit reached";
  return result;
}

}  // namespace

GicpResult gicp(
  std::span<const Eigen::Vector3d> source, std::span<const Eigen::Vector3d> target, const GicpConfig & config,
  const RigidTransform & initial)
{
  config.validate();
  // Solved about the target centroid so the small-angle update does not pivot
  // around a distant origin; the optimum is unchanged.
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto & p : target) c += p;
  if (!target.empty()) c /= static_cast<double>(target.size());
  std::vector<Eigen::Vector3d> src(source.begin(), source.end());
  std::vector<Eigen::Vector3d> tgt(target.begin(), target.end());
  for (auto & p : src) p -= c;
  for (auto & p : tgt) p -= c;
  const RigidTransform to_centered = RigidTransform::from_translation(-c);
  const RigidTransform from_centered = RigidTransform::from_translation(c);
  GicpResult r = gicp_centered(src, tgt, config, to_centered * initial * from_centered);
  r.transform = from_centered * r.transform * to_centered;
  return r;
}

}  // namespace obstacle_forge
