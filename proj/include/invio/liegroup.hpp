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

#include <Eigen/Core>

namespace invio {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

/// Tangent vector of SE_2(3) ordered (rotation, velocity, position).
using TangentVector = Vec9;

namespace lie {

/// Below this rotation angle the Γ-function coefficients are evaluated from
/// their power series instead of the trigonometric closed forms.
inline constexpr double kSeriesThreshold = 1e-2;

/// Distance from π inside which so3_log switches to the eigenvector branch.
inline constexpr double kNearPiThreshold = 1e-3;

/// Orthonormality tolerance for rotations handed to the logarithm.
inline constexpr double kRotationInputTolerance = 1e-6;

/// Stored rotations are re-orthonormalized once they drift past this.
inline constexpr double kRotationDriftTolerance = 1e-9;

/// Scalar coefficients shared by Γ₀, Γ₁, Γ₂ and Γ₁⁻¹, as functions of the
/// angle θ. Exposed for tests of branch continuity.
struct GammaCoefficients {
  double sin_over_theta;        // sinθ/θ
  double one_minus_cos_over2;   // (1-cosθ)/θ²
  double theta_minus_sin_over3; // (θ-sinθ)/θ³
  double gamma2_quadratic;      // (θ²+2cosθ-2)/(2θ⁴)
  double jacobian_inverse;      // 1/θ² - (1+cosθ)/(2θ sinθ)
};
GammaCoefficients gamma_coefficients(double theta);
GammaCoefficients gamma_coefficients_closed_form(double theta);
GammaCoefficients gamma_coefficients_series(double theta);

}  // namespace lie

/// (φ)× : the skew-symmetric matrix with (φ)× x = φ × x.
Mat3 hat(const Vec3& phi);
Vec3 vee(const Mat3& m);

/// Γ₀: SO(3) exponential (Rodrigues).
Mat3 so3_exp(const Vec3& phi);

/// Principal logarithm, ‖φ‖ ≤ π. At exactly θ = π the axis sign is fixed so
/// that its largest-magnitude component is positive.
Vec3 so3_log(const Mat3& rotation);

/// Γ₁: left Jacobian of SO(3), ∫₀¹ exp(sφ) ds.
Mat3 gamma1(const Vec3& phi);

/// Γ₂: ∫₀¹∫₀ˢ exp(τφ) dτ ds.
Mat3 gamma2(const Vec3& phi);

/// Γ₁(φ)⁻¹ in closed form.
Mat3 gamma1_inverse(const Vec3& phi);

bool is_rotation(const Mat3& rotation, double tolerance = lie::kRotationDriftTolerance);

/// Nearest rotation in the Frobenius sense (polar decomposition).
Mat3 orthonormalize(const Mat3& m);

/// Element of SE_2(3): rotation, velocity and position packed as the 5x5
/// matrix [[R v p],[0 1 0],[0 0 1]].
class ExtendedPose {
 public:
  EIGEN_MAKE_ALIGNED_OPERATOR_NEW

  ExtendedPose();

  /// Throws InvalidArgument if `rotation` is not within 1e-6 of SO(3) or any
  /// entry is non-finite. Small drift is removed by orthonormalization.
  ExtendedPose(const Mat3& rotation, const Vec3& velocity, const Vec3& position);

  static ExtendedPose Identity() { return ExtendedPose(); }
  static ExtendedPose FromMatrix(const Mat5& m);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& velocity() const { return velocity_; }
  const Vec3& position() const { return position_; }

  Mat5 matrix() const;
  ExtendedPose inverse() const;
  ExtendedPose operator*(const ExtendedPose& rhs) const;

 private:
  struct Unchecked {};
  ExtendedPose(Unchecked, const Mat3& rotation, const Vec3& velocity, const Vec3& position);

  Mat3 rotation_;
  Vec3 velocity_;
  Vec3 position_;
};

Mat5 se23_hat(const TangentVector& xi);
TangentVector se23_vee(const Mat5& m);

ExtendedPose se23_exp(const TangentVector& xi);
TangentVector se23_log(const ExtendedPose& pose);

/// Matrix of Ad_X acting on tangent vectors: X ξ^ X⁻¹ = (Ad_X ξ)^.
Mat9 adjoint(const ExtendedPose& pose);

/// Retraction ξ ⊕ X = exp(ξ^) X (left perturbation, right-invariant error).
ExtendedPose retract(const TangentVector& xi, const ExtendedPose& pose);

/// Right-invariant error log(X X̂⁻¹)^∨.
TangentVector right_invariant_error(const ExtendedPose& truth, const ExtendedPose& estimate);

}  // namespace invio
