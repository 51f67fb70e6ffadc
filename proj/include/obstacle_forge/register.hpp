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

#ifndef OBSTACLE_FORGE_REGISTER_HPP
#define OBSTACLE_FORGE_REGISTER_HPP

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "obstacle_forge/core.hpp"

namespace obstacle_forge
{

struct GicpConfig
{
  std::size_t k_neighbors{20};
  double cov_epsilon{1e-3};
  double max_corr_dist{1.0};
  int max_iterations{50};
  double trans_tol{1e-4};
  double rot_tol{1e-4};
  /// Restricts the update to translation and yaw (rotation about z).
  bool planar{false};
  /// When positive, update directions whose normal-matrix eigenvalue is below
  /// this fraction of the largest are left at the current estimate.
  double degeneracy_ratio{0.0};

  void validate() const;
};

struct GicpStep
{
  double cost_before{0.0};
  double cost_after{0.0};
  int halvings{0};
  std::size_t correspondences{0};
};

struct GicpResult
{
  RigidTransform transform;  // source -> target
  double final_cost{0.0};
  int iterations{0};
  bool converged{false};
  std::string failure_reason;  // empty unless the alignment failed
  std::vector<GicpStep> steps;  // one per accepted Gauss-Newton step
};

/// Plane-regularized covariance per point: the k-NN covariance (self
/// included) with its eigenvalues replaced by (cov_epsilon, 1, 1).
/// Throws kValidation with fewer than k_neighbors + 1 points.
std::vector<Eigen::Matrix3d> estimate_covariances(
  std::span<const Eigen::Vector3d> points, std::size_t k_neighbors, double cov_epsilon);

/// Left increment: (translation dt, small rotation w) applied after `t`, with
/// the rotation re-orthonormalized.
RigidTransform apply_increment(const RigidTransform & t, const Eigen::Matrix<double, 6, 1> & delta);

/// d = target - T(source) and its Jacobian w.r.t. the left increment
/// (dt, w) at zero: [-I, [T(source)]x].
Eigen::Vector3d gicp_residual(const RigidTransform & t, const Eigen::Vector3d & source, const Eigen::Vector3d & target);
Eigen::Matrix<double, 3, 6> gicp_jacobian(const RigidTransform & t, const Eigen::Vector3d & source);

/// Generalized-ICP (plane-to-plane) by Gauss-Newton with step halving.
/// Fails (converged = false, failure_reason set) when a correspondence pass
/// finds no pair within max_corr_dist. Throws kValidation when either cloud
/// has fewer than k_neighbors + 1 points.
GicpResult gicp(
  std::span<const Eigen::Vector3d> source, std::span<const Eigen::Vector3d> target, const GicpConfig & config = {},
  const RigidTransform & initial = RigidTransform::identity());

}  // namespace obstacle_forge

#endif  // OBSTACLE_FORGE_REGISTER_HPP
