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

#include "invio/autodiff_lie.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "invio/error.hpp"

namespace invio::ad {

namespace {

using Poly = std::array<double, 5>;

// Taylor coefficients in θ², same truncation as the double versions.
constexpr Poly kSinOverTheta = {1.0, -1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0, 1.0 / 362880.0};
constexpr Poly kOneMinusCosOver2 = {0.5, -1.0 / 24.0, 1.0 / 720.0, -1.0 / 40320.0, 1.0 / 3628800.0};
constexpr Poly kThetaMinusSinOver3 = {1.0 / 6.0, -1.0 / 120.0, 1.0 / 5040.0, -1.0 / 362880.0, 1.0 / 39916800.0};
constexpr Poly kGamma2Quadratic = {1.0 / 24.0, -1.0 / 720.0, 1.0 / 40320.0, -1.0 / 3628800.0, 1.0 / 479001600.0};
constexpr Poly kJacobianInverse = {1.0 / 12.0, 1.0 / 720.0, 1.0 / 30240.0, 1.0 / 1209600.0, 1.0 / 47900160.0};
// asin(s)/s in s²: θ/sinθ for the small-angle log.
constexpr Poly kArcsinOverS = {1.0, 1.0 / 6.0, 3.0 / 40.0, 5.0 / 112.0, 35.0 / 1152.0};

Var polynomial(Var x, const Poly& c) {
  Tape& tape = *x.tape;
  Var acc = tape.scalar_constant(c[4]);
  for (int i = 3; i >= 0; --i) acc = add(mul(x, acc), tape.scalar_constant(c[static_cast<std::size_t>(i)]));
  return acc;
}

Var identity(Tape& tape) { return tape.constant(Eigen::Matrix3d::Identity()); }

// Lazily built scalar coefficients of one rotation vector.
class Coefficients {
 public:
  explicit Coefficients(Var phi) : phi_(phi), tape_(*phi.tape) {
    theta2_ = sum(mul(phi, phi));
    small_ = std::sqrt(theta2_.scalar()) < lie::kSeriesThreshold;
    if (!small_) {
      theta_ = sqrt(theta2_);
      inv_theta_ = reciprocal(theta_);
      half_sin_ = sin(scale(theta_, 0.5));
    }
  }

  Var sin_over_theta() {
    if (small_) return polynomial(theta2_, kSinOverTheta);
    return mul(sin(theta_), inv_theta_);
  }

  Var one_minus_cos_over2() {
    if (small_) return polynomial(theta2_, kOneMinusCosOver2);
    return scale(mul(mul(half_sin_, half_sin_), inv_theta2()), 2.0);
  }

  Var theta_minus_sin_over3() {
    if (small_) return polynomial(theta2_, kThetaMinusSinOver3);
    return mul(sub(theta_, sin(theta_)), mul(inv_theta2(), inv_theta_));
  }

  Var gamma2_quadratic() {
    if (small_) return polynomial(theta2_, kGamma2Quadratic);
    const Var two_hs = scale(half_sin_, 2.0);
    const Var product = mul(sub(theta_, two_hs), add(theta_, two_hs));
    return scale(mul(product, mul(inv_theta2(), inv_theta2())), 0.5);
  }

  Var jacobian_inverse() {
    if (small_) return polynomial(theta2_, kJacobianInverse);
    const Var cot_half = mul(cos(scale(theta_, 0.5)), reciprocal(half_sin_));
    return sub(inv_theta2(), scale(mul(cot_half, inv_theta_), 0.5));
  }

  Var skew() {
    if (!skew_.valid()) skew_ = hat(phi_);
    return skew_;
  }

  Var skew2() {
    if (!skew2_.valid()) skew2_ = matmul(skew(), skew());
    return skew2_;
  }

  Tape& tape() { return tape_; }

 private:
  Var inv_theta2() {
    if (!inv_theta2_.valid()) inv_theta2_ = mul(inv_theta_, inv_theta_);
    return inv_theta2_;
  }

  Var phi_;
  Tape& tape_;
  Var theta2_, theta_, inv_theta_, inv_theta2_, half_sin_, skew_, skew2_;
  bool small_ = false;
};

Var trace(Var m) {
  return add(add(slice(m, 0, 0, 1, 1), slice(m, 1, 1, 1, 1)), slice(m, 2, 2, 1, 1));
}

}  // namespace

PoseVar constant_pose(Tape& tape, const ExtendedPose& pose) {
  return {tape.constant(pose.rotation()), tape.constant(pose.velocity()), tape.constant(pose.position())};
}

PoseVar compose(const PoseVar& a, const PoseVar& b) {
  return {matmul(a.rotation, b.rotation), add(matmul(a.rotation, b.velocity), a.velocity),
          add(matmul(a.rotation, b.position), a.position)};
}

PoseVar inverse(const PoseVar& a) {
  const Var rt = transpose(a.rotation);
  return {rt, -matmul(rt, a.velocity), -matmul(rt, a.position)};
}

Var so3_exp(Var phi) {
  Coefficients c(phi);
  return add(add(identity(c.tape()), mul(c.skew(), c.sin_over_theta())), mul(c.skew2(), c.one_minus_cos_over2()));
}

Var gamma1(Var phi) {
  Coefficients c(phi);
  return add(add(identity(c.tape()), mul(c.skew(), c.one_minus_cos_over2())),
             mul(c.skew2(), c.theta_minus_sin_over3()));
}

Var gamma2(Var phi) {
  Coefficients c(phi);
  return add(add(scale(identity(c.tape()), 0.5), mul(c.skew(), c.theta_minus_sin_over3())),
             mul(c.skew2(), c.gamma2_quadratic()));
}

Var gamma1_inverse(Var phi) {
  Coefficients c(phi);
  return add(sub(identity(c.tape()), scale(c.skew(), 0.5)), mul(c.skew2(), c.jacobian_inverse()));
}

GammaVars gammas(Var phi) {
  Coefficients c(phi);
  const Var eye = identity(c.tape());
  const Var a = c.sin_over_theta();
  const Var b = c.one_minus_cos_over2();
  const Var d = c.theta_minus_sin_over3();
  const Var e = c.gamma2_quadratic();
  GammaVars out;
  out.exp = add(add(eye, mul(c.skew(), a)), mul(c.skew2(), b));
  out.gamma1 = add(add(eye, mul(c.skew(), b)), mul(c.skew2(), d));
  out.gamma2 = add(add(scale(eye, 0.5), mul(c.skew(), d)), mul(c.skew2(), e));
  return out;
}

Var so3_log(Var rotation, long step) {
  const Var d = sub(rotation, transpose(rotation));
  const Var w = scale(concat({slice(d, 2, 1, 1, 1), slice(d, 0, 2, 1, 1), slice(d, 1, 0, 1, 1)}), 0.5);
  const Var s2 = sum(mul(w, w));
  const Var c = scale(sub(trace(rotation), rotation.tape->scalar_constant(1.0)), 0.5);
  const double theta = std::atan2(std::sqrt(s2.scalar()), c.scalar());

  if (theta < lie::kSeriesThreshold) return mul(w, polynomial(s2, kArcsinOverS));
  if (std::numbers::pi - theta <= lie::kNearPiThreshold) {
    throw NumericDomainError("so3_log: rotation angle within the near-pi band, gradient undefined", step);
  }
  const Var s = sqrt(s2);
  return mul(w, mul(atan2(s, c), reciprocal(s)));
}

Var se23_log(const PoseVar& pose, long step) {
  const Var phi = so3_log(pose.rotation, step);
  const Var j_inv = gamma1_inverse(phi);
  return concat({phi, matmul(j_inv, pose.velocity), matmul(j_inv, pose.position)});
}

PoseVar propagate(const PoseVar& pose, Var omega, Var accel, double dt, const Vec3& gravity) {
  Tape& tape = *pose.rotation.tape;
  const Var phi = scale(omega, dt);
  const GammaVars g = gammas(phi);
  PoseVar out;
  out.rotation = matmul(pose.rotation, g.exp);
  const Var dv = scale(matmul(pose.rotation, matmul(g.gamma1, accel)), dt);
  out.velocity = add(add(pose.velocity, tape.constant(gravity * dt)), dv);
  const Var dp = scale(matmul(pose.rotation, matmul(g.gamma2, accel)), dt * dt);
  out.position = add(add(add(pose.position, scale(pose.velocity, dt)), tape.constant(0.5 * gravity * dt * dt)), dp);
  return out;
}

}  // namespace invio::ad
