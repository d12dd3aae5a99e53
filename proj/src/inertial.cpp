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

#include "invio/inertial.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "invio/error.hpp"

namespace invio {

Eigen::Matrix<double, 6, 1> ImuBias::stacked() const {
  Eigen::Matrix<double, 6, 1> b;
  b << gyro, accel;
  return b;
}

ImuBias ImuBias::FromStacked(const Eigen::Matrix<double, 6, 1>& b) { return {b.head<3>(), b.tail<3>()}; }

NoiseParams NoiseParams::Aerodrome() {
  NoiseParams n;
  n.sigma_g = 1e-2;
  n.sigma_bg = 6e-4;
  n.sigma_a = 1e-1;
  n.sigma_ba = 7e-3;
  return n;
}

NoiseParams NoiseParams::Noiseless() {
  NoiseParams n;
  n.sigma_g = n.sigma_bg = n.sigma_a = n.sigma_ba = n.sigma_v = 0.0;
  return n;
}

void NoiseParams::validate() const {
  for (double s : {sigma_g, sigma_bg, sigma_a, sigma_ba, sigma_v}) {
    if (!std::isfinite(s) || s < 0.0) throw InvalidArgument("noise densities must be finite and >= 0");
  }
  if (!gravity.allFinite()) throw InvalidArgument("gravity must be finite");
}

Mat9 NoiseParams::process_covariance() const {
  Vec9 d;
  d << Vec3::Constant(sigma_g * sigma_g), Vec3::Constant(sigma_a * sigma_a), Vec3::Constant(sigma_v * sigma_v);
  return d.asDiagonal();
}

ExtendedPose propagate_state(const ExtendedPose& pose, const ImuSample& sample, const ImuBias& bias,
                             double dt, const NoiseParams& noise) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("propagate_state: dt must be > 0");
  const Vec3 omega = sample.omega - bias.gyro;
  const Vec3 accel = sample.accel - bias.accel;
  if (!omega.allFinite() || !accel.allFinite()) {
    throw InvalidArgument("propagate_state: non-finite corrected inputs");
  }
  const Vec3 phi = omega * dt;
  const Mat3& r = pose.rotation();
  const Vec3& g = noise.gravity;
  const Mat3 rotation = r * so3_exp(phi);
  const Vec3 velocity = pose.velocity() + g * dt + r * gamma1(phi) * accel * dt;
  const Vec3 position =
      pose.position() + pose.velocity() * dt + 0.5 * g * dt * dt + r * gamma2(phi) * accel * (dt * dt);
  return ExtendedPose(rotation, velocity, position);
}

Mat9 invariant_error_dynamics(const Vec3& gravity) {
  Mat9 a = Mat9::Zero();
  a.block<3, 3>(3, 0) = hat(gravity);
  a.block<3, 3>(6, 3) = Mat3::Identity();
  return a;
}

Mat9 invariant_transition(double dt, const NoiseParams& noise) {
  const Mat9 a = invariant_error_dynamics(noise.gravity);
  return Mat9::Identity() + a * dt + 0.5 * (a * a) * (dt * dt);
}

bool is_symmetric_psd(const Eigen::MatrixXd& cov, double tolerance) {
  if (cov.rows() != cov.cols() || !cov.allFinite()) return false;
  if (cov.size() == 0) return true;
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tolerance * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tolerance * scale;
}

Covariance9 propagate_covariance(const Covariance9& cov, const ExtendedPose& pose, double dt,
                                 const NoiseParams& noise) {
  if (!is_symmetric_psd(cov)) throw StateCorruption("propagate_covariance: input is not symmetric PSD");
  const Mat9 phi = invariant_transition(dt, noise);
  const Mat9 g = adjoint(pose);
  const Mat9 q = g * noise.process_covariance() * g.transpose();
  Mat9 out = phi * (cov + q * dt) * phi.transpose();
  return 0.5 * (out + out.transpose());
}

RelativeIncrements relative_increments(std::span<const Mat3> rotations, std::span<const ImuSample> samples,
                                       std::span<const ImuBias> biases, const Vec3& initial_velocity,
                                       const NoiseParams& noise) {
  if (rotations.size() != samples.size() || biases.size() != samples.size()) {
    throw InvalidArgument("relative_increments: rotations, samples and biases differ in length");
  }
  if (samples.size() < 2) throw InvalidArgument("relative_increments: need at least two samples (i < j)");

  RelativeIncrements out;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double dt = samples[k + 1].t - samples[k].t;
    if (!(dt > 0.0)) throw InvalidArgument("relative_increments: timestamps must increase");
    const Vec3 world_accel = rotations[k] * (samples[k].accel - biases[k].accel) + noise.gravity;
    const Vec3 half_term = 0.5 * world_accel * dt * dt;
    // out.delta_v currently holds Δv_ik.
    out.delta_p += (initial_velocity + out.delta_v) * dt + half_term;
    out.delta_p_without_initial_velocity += out.delta_v * dt + half_term;
    out.delta_v += world_accel * dt;
  }
  return out;
}

}  // namespace invio
