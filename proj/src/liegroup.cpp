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

#include "invio/liegroup.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "invio/error.hpp"

namespace invio {

namespace lie {

GammaCoefficients gamma_coefficients_series(double theta) {
  const double t2 = theta * theta;
  const double t4 = t2 * t2;
  const double t6 = t4 * t2;
  const double t8 = t4 * t4;
  GammaCoefficients c;
  c.sin_over_theta = 1.0 - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0 + t8 / 362880.0;
  c.one_minus_cos_over2 = 0.5 - t2 / 24.0 + t4 / 720.0 - t6 / 40320.0 + t8 / 3628800.0;
  c.theta_minus_sin_over3 = 1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t6 / 362880.0 + t8 / 39916800.0;
  c.gamma2_quadratic = 1.0 / 24.0 - t2 / 720.0 + t4 / 40320.0 - t6 / 3628800.0 + t8 / 479001600.0;
  c.jacobian_inverse = 1.0 / 12.0 + t2 / 720.0 + t4 / 30240.0 + t6 / 1209600.0 + t8 / 47900160.0;
  return c;
}

GammaCoefficients gamma_coefficients_closed_form(double theta) {
  const double s = std::sin(theta);
  const double half_s = std::sin(0.5 * theta);
  const double t2 = theta * theta;
  GammaCoefficients out;
  out.sin_over_theta = s / theta;
  // 1 - cos θ = 2 sin²(θ/2) avoids the leading-order cancellation.
  out.one_minus_cos_over2 = 2.0 * half_s * half_s / t2;
  out.theta_minus_sin_over3 = (theta - s) / (t2 * theta);
  // θ² + 2cosθ - 2 = (θ - 2 sin(θ/2)) (θ + 2 sin(θ/2)).
  out.gamma2_quadratic = (theta - 2.0 * half_s) * (theta + 2.0 * half_s) / (2.0 * t2 * t2);
  // (1+cosθ)/(2θ sinθ) = cot(θ/2)/(2θ), finite at θ = π.
  out.jacobian_inverse = 1.0 / t2 - std::cos(0.5 * theta) / (2.0 * theta * half_s);
  return out;
}

GammaCoefficients gamma_coefficients(double theta) {
  return theta < kSeriesThreshold ? gamma_coefficients_series(theta)
                                  : gamma_coefficients_closed_form(theta);
}

}  // namespace lie

namespace {

void require_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite input");
}

}  // namespace

Mat3 hat(const Vec3& phi) {
  Mat3 m;
  // clang-format off
  m <<       0.0, -phi.z(),  phi.y(),
         phi.z(),      0.0, -phi.x(),
        -phi.y(),  phi.x(),      0.0;
  // clang-format on
  return m;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat3 so3_exp(const Vec3& phi) {
  require_finite(phi, "so3_exp");
  const auto c = lie::gamma_coefficients(phi.norm());
  const Mat3 k = hat(phi);
  return Mat3::Identity() + c.sin_over_theta * k + c.one_minus_cos_over2 * k * k;
}

Mat3 gamma1(const Vec3& phi) {
  require_finite(phi, "gamma1");
  const auto c = lie::gamma_coefficients(phi.norm());
  const Mat3 k = hat(phi);
  return Mat3::Identity() + c.one_minus_cos_over2 * k + c.theta_minus_sin_over3 * k * k;
}

Mat3 gamma2(const Vec3& phi) {
  require_finite(phi, "gamma2");
  const auto c = lie::gamma_coefficients(phi.norm());
  const Mat3 k = hat(phi);
  return 0.5 * Mat3::Identity() + c.theta_minus_sin_over3 * k + c.gamma2_quadratic * k * k;
}

Mat3 gamma1_inverse(const Vec3& phi) {
  require_finite(phi, "gamma1_inverse");
  const auto c = lie::gamma_coefficients(phi.norm());
  const Mat3 k = hat(phi);
  return Mat3::Identity() - 0.5 * k + c.jacobian_inverse * k * k;
}

bool is_rotation(const Mat3& rotation, double tolerance) {
  if (!rotation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).norm();
  return ortho <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

Vec3 so3_log(const Mat3& rotation) {
  if (!is_rotation(rotation, lie::kRotationInputTolerance)) {
    throw InvalidArgument("so3_log: input is not a rotation matrix");
  }
  const Vec3 w = 0.5 * vee(rotation - rotation.transpose());
  const double s = w.norm();
  const double c = std::clamp(0.5 * (rotation.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(s, c);

  if (theta < lie::kSeriesThreshold) {
    return w / lie::gamma_coefficients_series(theta).sin_over_theta;
  }
  if (std::numbers::pi - theta > lie::kNearPiThreshold) {
    return (theta / s) * w;
  }

  // Near π: the axis is the dominant eigenvector of the symmetric part,
  // S = cosθ I + (1 - cosθ) a aᵀ.
  const Mat3 sym = 0.5 * (rotation + rotation.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(sym);
  Vec3 axis = eig.eigenvectors().col(2).normalized();
  const double alignment = axis.dot(w);
  if (std::abs(alignment) > 1e-12) {
    if (alignment < 0.0) axis = -axis;
  } else {
    Eigen::Index largest = 0;
    axis.cwiseAbs().maxCoeff(&largest);
    if (axis(largest) < 0.0) axis = -axis;
  }
  return theta * axis;
}

ExtendedPose::ExtendedPose()
    : rotation_(Mat3::Identity()), velocity_(Vec3::Zero()), position_(Vec3::Zero()) {}

ExtendedPose::ExtendedPose(Unchecked, const Mat3& rotation, const Vec3& velocity, const Vec3& position)
    : rotation_(rotation), velocity_(velocity), position_(position) {}

ExtendedPose::ExtendedPose(const Mat3& rotation, const Vec3& velocity, const Vec3& position)
    : rotation_(rotation), velocity_(velocity), position_(position) {
  if (!velocity.allFinite() || !position.allFinite()) {
    throw InvalidArgument("ExtendedPose: non-finite velocity or position");
  }
  if (!is_rotation(rotation_, lie::kRotationInputTolerance)) {
    throw InvalidArgument("ExtendedPose: rotation block is not in SO(3)");
  }
  if (!is_rotation(rotation_, lie::kRotationDriftTolerance)) rotation_ = orthonormalize(rotation_);
}

ExtendedPose ExtendedPose::FromMatrix(const Mat5& m) {
  return ExtendedPose(m.topLeftCorner<3, 3>(), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4));
}

Mat5 ExtendedPose::matrix() const {
  Mat5 m = Mat5::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.block<3, 1>(0, 3) = velocity_;
  m.block<3, 1>(0, 4) = position_;
  return m;
}

ExtendedPose ExtendedPose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return ExtendedPose(Unchecked{}, rt, -rt * velocity_, -rt * position_);
}

ExtendedPose ExtendedPose::operator*(const ExtendedPose& rhs) const {
  Mat3 r = rotation_ * rhs.rotation_;
  if (!is_rotation(r, lie::kRotationDriftTolerance)) r = orthonormalize(r);
  return ExtendedPose(Unchecked{}, r, rotation_ * rhs.velocity_ + velocity_,
                      rotation_ * rhs.position_ + position_);
}

Mat5 se23_hat(const TangentVector& xi) {
  Mat5 m = Mat5::Zero();
  m.topLeftCorner<3, 3>() = hat(xi.head<3>());
  m.block<3, 1>(0, 3) = xi.segment<3>(3);
  m.block<3, 1>(0, 4) = xi.tail<3>();
  return m;
}

TangentVector se23_vee(const Mat5& m) {
  TangentVector xi;
  xi << vee(m.topLeftCorner<3, 3>()), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4);
  return xi;
}

ExtendedPose se23_exp(const TangentVector& xi) {
  if (!xi.allFinite()) throw InvalidArgument("se23_exp: non-finite input");
  const Vec3 phi = xi.head<3>();
  const Mat3 j = gamma1(phi);
  return ExtendedPose(so3_exp(phi), j * xi.segment<3>(3), j * xi.tail<3>());
}

TangentVector se23_log(const ExtendedPose& pose) {
  const Vec3 phi = so3_log(pose.rotation());
  const Mat3 j_inv = gamma1_inverse(phi);
  TangentVector xi;
  xi << phi, j_inv * pose.velocity(), j_inv * pose.position();
  return xi;
}

Mat9 adjoint(const ExtendedPose& pose) {
  const Mat3& r = pose.rotation();
  Mat9 ad = Mat9::Zero();
  ad.block<3, 3>(0, 0) = r;
  ad.block<3, 3>(3, 0) = hat(pose.velocity()) * r;
  ad.block<3, 3>(3, 3) = r;
  ad.block<3, 3>(6, 0) = hat(pose.position()) * r;
  ad.block<3, 3>(6, 6) = r;
  return ad;
}

ExtendedPose retract(const TangentVector& xi, const ExtendedPose& pose) { return se23_exp(xi) * pose; }

TangentVector right_invariant_error(const ExtendedPose& truth, const ExtendedPose& estimate) {
  return se23_log(truth * estimate.inverse());
}

}  // namespace invio
