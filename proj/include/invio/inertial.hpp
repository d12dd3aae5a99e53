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

#include "invio/liegroup.hpp"

namespace invio {

/// One IMU reading: body-frame angular rate (rad/s) and specific force
/// (m/s²) at time t (seconds, relative to the dataset's time origin).
struct ImuSample {
  double t = 0.0;
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// Additive gyroscope (rad/s) and accelerometer (m/s²) offsets.
struct ImuBias {
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();

  static ImuBias Zero() { return {}; }
  Eigen::Matrix<double, 6, 1> stacked() const;
  static ImuBias FromStacked(const Eigen::Matrix<double, 6, 1>& b);
};

/// Continuous-time noise densities. Defaults follow the EuRoC column of the
/// usual VIO noise table. sigma_bg / sigma_ba only drive the synthetic bias
/// generator; the filter never carries bias states.
struct NoiseParams {
  double sigma_g = 1e-2;   // rad/s/√Hz
  double sigma_bg = 8e-4;  // rad/s²/√Hz
  double sigma_a = 3e-2;   // m/s²/√Hz
  double sigma_ba = 2e-4;  // m/s³/√Hz
  double sigma_v = 0.0;    // m/s/√Hz, velocity pseudo-noise
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  static NoiseParams EuRoC() { return {}; }
  static NoiseParams Aerodrome();
  static NoiseParams Noiseless();

  /// Throws InvalidArgument for negative or non-finite densities.
  void validate() const;

  /// Cov(n) for n = (n_g, n_a, n_v): diag(σ_g² I, σ_a² I, σ_v² I).
  Mat9 process_covariance() const;
};

using Covariance9 = Mat9;

/// Closed-form SE_2(3) integration over [t, t+dt) with piecewise-constant
/// bias-corrected inputs:
///   R' = R Γ₀(ω̃ dt)
///   v' = v + g dt + R Γ₁(ω̃ dt) ã dt
///   p' = p + v dt + ½ g dt² + R Γ₂(ω̃ dt) ã dt²
ExtendedPose propagate_state(const ExtendedPose& pose, const ImuSample& sample, const ImuBias& bias,
                             double dt, const NoiseParams& noise);

/// A of the right-invariant error dynamics: [[0,0,0],[(g)×,0,0],[0,I,0]].
Mat9 invariant_error_dynamics(const Vec3& gravity);

/// Φ = exp(A dt) = I + A dt + ½ A² dt² (A is nilpotent of order 3).
/// Deliberately takes no pose: the transition is state independent.
Mat9 invariant_transition(double dt, const NoiseParams& noise);

/// P' = Φ P Φᵀ + Φ Ad_X Cov(n) Ad_Xᵀ Φᵀ dt, symmetrized.
/// Throws StateCorruption if P is not symmetric PSD within 1e-10.
Covariance9 propagate_covariance(const Covariance9& cov, const ExtendedPose& pose, double dt,
                                 const NoiseParams& noise);

/// Symmetric within 1e-10 (relative to the largest entry when that exceeds 1)
/// and smallest eigenvalue ≥ -1e-10.
bool is_symmetric_psd(const Eigen::MatrixXd& cov, double tolerance = 1e-10);

struct RelativeIncrements {
  Vec3 delta_v = Vec3::Zero();
  Vec3 delta_p = Vec3::Zero();
  /// Δp without the Σ v_i Δt_k term.
  Vec3 delta_p_without_initial_velocity = Vec3::Zero();
};

/// Velocity/position increments between the first and last sample using the
/// world-frame summation
///   Δv_ij = Σ_k (R_k (ā_k - b̂ᵃ_k) + g) Δt_k
///   Δp_ij = Σ_k (v_i + Δv_ik) Δt_k + ½ (R_k (ā_k - b̂ᵃ_k) + g) Δt_k²
/// All three spans must have the same length ≥ 2; entry k pairs R_k, ū_k, b̂_k.
RelativeIncrements relative_increments(std::span<const Mat3> rotations, std::span<const ImuSample> samples,
                                       std::span<const ImuBias> biases, const Vec3& initial_velocity,
                                       const NoiseParams& noise);

}  // namespace invio
