// Copyright 2026 The invio Authors
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

#pragma once

#include <span>
#include <vector>

#include "invio/camera.hpp"
#include "invio/inertial.hpp"

namespace invio {

/// Body pose frozen at a camera frame.
struct Clone {
  double t = 0.0;
  long frame = 0;
  ExtendedPose pose;
};

struct FeatureObservation {
  std::size_t clone = 0;  // index into the clone list the track is used with
  Vec2 pixel = Vec2::Zero();
};

struct FeatureTrack {
  long id = 0;
  std::vector<FeatureObservation> observations;
};

struct TriangulationConfig {
  int max_iterations = 20;
  double step_tolerance = 1e-9;      // on the inverse-depth parameters
  double min_parallax_rad = 1e-3;    // largest angle between viewing rays
  double min_depth = 0.05;           // metres, in every observing camera
};

struct TriangulationResult {
  Vec3 landmark = Vec3::Zero();
  int iterations = 0;
  double rms_residual_px = 0.0;
};

/// Linear initialization followed by Gauss-Newton on inverse depth in the
/// first observing camera. Throws DegenerateGeometry (too little parallax or
/// fewer than two views), ConvergenceError (no convergence within the
/// iteration budget) or CheiralityError (solution behind a camera).
TriangulationResult triangulate(const FeatureTrack& track, std::span<const Clone> clones,
                                const CameraModel& camera, const TriangulationConfig& config = {});

/// Current extended pose followed by the sliding window of clones. The
/// covariance is ordered the same way, 9 rows per pose, each block in the
/// (rotation, velocity, position) right-invariant error coordinates.
struct FilterState {
  double t = 0.0;
  ExtendedPose pose;
  std::vector<Clone> clones;  // oldest first
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(9, 9);

  Eigen::Index dim() const { return 9 * (1 + static_cast<Eigen::Index>(clones.size())); }
};

/// Default initial standard deviations: 1e-2 rad, 1e-1 m/s, 1e-2 m.
Vec9 default_initial_variances();

FilterState make_filter_state(double t, const ExtendedPose& pose, const Vec9& variances = default_initial_variances());

/// Closed-form propagation of the current pose, Φ-propagation of its
/// covariance block and cross-covariances; clones stay put. Throws
/// StateCorruption if the current block is not symmetric PSD.
void propagate(FilterState& state, const ImuSample& sample, const ImuBias& bias, double dt, const NoiseParams& noise);

/// Copies the current pose into a new clone, marginalizing the oldest clone
/// first when the window already holds `max_clones`.
void augment_clone(FilterState& state, long frame, std::size_t max_clones);

void marginalize_oldest_clone(FilterState& state);

struct FeatureJacobian {
  Eigen::MatrixXd h_x;        // 2m x dim
  Eigen::MatrixXd h_l;        // 2m x 3
  Eigen::VectorXd residual;   // z - h, pixels
};

/// Linearization of all observations of a track about the state estimate.
FeatureJacobian feature_jacobian(const FeatureTrack& track, const FilterState& state, const Vec3& landmark,
                                 const CameraModel& camera);

struct ProjectedMeasurement {
  Eigen::MatrixXd h;
  Eigen::VectorXd residual;
};

/// Projects onto the left nullspace of H_l (2m-3 rows). Throws
/// DegenerateGeometry when H_l is rank deficient.
ProjectedMeasurement nullspace_project(const FeatureJacobian& jac);

/// χ² statistic rᵀ(H P Hᵀ + σ² I)⁻¹ r.
double mahalanobis(const FilterState& state, const ProjectedMeasurement& m, double pixel_sigma);

/// Quantile of the χ² distribution with `dof` degrees of freedom.
double chi2_quantile(double probability, double dof);

struct UpdateOutcome {
  Eigen::Index rows = 0;
  double innovation_norm = 0.0;
};

/// EKF update with isotropic pixel noise, Joseph-form covariance and a
/// single retraction of every pose block. Measurements taller than the
/// state are QR-compressed first. Throws NumericError if S is not positive
/// definite.
UpdateOutcome ekf_update(FilterState& state, const Eigen::MatrixXd& h, const Eigen::VectorXd& residual,
                         double pixel_sigma);

}  // namespace invio
