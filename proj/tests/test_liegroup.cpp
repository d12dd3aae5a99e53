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

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <numbers>

#include "invio/error.hpp"
#include "invio/liegroup.hpp"
#include "test_util.hpp"

using namespace invio;
using invio::test::random_pose;
using invio::test::random_rotation_vector;
using invio::test::random_tangent;

namespace {

// Composite Simpson rule for f on [0, 1].
template <typename F>
Mat3 simpson(F&& f, int n = 200) {
  const double h = 1.0 / n;
  Mat3 sum = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

Mat3 expm(const Vec3& phi) { return Mat3(hat(phi).exp()); }

}  // namespace

TEST(Hat, VeeInverse) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = invio::test::random_vec3(rng);
    EXPECT_TRUE(vee(hat(v)).isApprox(v));
    EXPECT_NEAR((hat(v) + hat(v).transpose()).norm(), 0.0, 1e-15);
    const Vec3 w = invio::test::random_vec3(rng);
    EXPECT_TRUE((hat(v) * w).isApprox(v.cross(w)));
  }
}

TEST(So3, ExpMatchesMatrixExponential) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 phi = random_rotation_vector(rng, 0.0, std::numbers::pi);
    EXPECT_LT((so3_exp(phi) - expm(phi)).norm(), 1e-12);
  }
}

TEST(So3, LogExpRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const Vec3 phi = random_rotation_vector(rng, 0.0, std::numbers::pi - 1e-6);
    EXPECT_LT((so3_log(so3_exp(phi)) - phi).norm(), 1e-9) << phi.transpose();
  }
}

TEST(So3, SmallAngles) {
  for (double theta : {0.0, 1e-12, 1e-8, 1e-5, 1e-3, 9.99e-3, 1.001e-2}) {
    const Vec3 phi = Vec3(1.0, -2.0, 0.5).normalized() * theta;
    EXPECT_LT((so3_exp(phi) - expm(phi)).norm(), 1e-15);
    EXPECT_LT((so3_log(so3_exp(phi)) - phi).norm(), 1e-15);
  }
}

TEST(So3, NearPi) {
  const Vec3 axis = Vec3(0.3, -0.4, 0.2).normalized();
  for (double eps : {1e-2, 1e-4, 1e-7, 0.0}) {
    const Vec3 phi = axis * (std::numbers::pi - eps);
    const Vec3 back = so3_log(so3_exp(phi));
    EXPECT_LT((so3_exp(back) - so3_exp(phi)).norm(), 1e-9);
    EXPECT_NEAR(back.norm(), std::numbers::pi - eps, 1e-7);
  }
  // Exactly π about z resolves to +z.
  const Vec3 z = so3_log(so3_exp(Vec3(0, 0, std::numbers::pi)));
  EXPECT_LT((z - Vec3(0, 0, std::numbers::pi)).norm(), 1e-9);
}

TEST(So3, LogRejectsNonRotation) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = 1.1;
  EXPECT_THROW(so3_log(m), InvalidArgument);
  EXPECT_THROW(so3_log(-Mat3::Identity()), InvalidArgument);
}

TEST(Gamma, QuadratureOracles) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Vec3 phi = random_rotation_vector(rng, 0.0, 3.0);
    const Mat3 g1 = simpson([&](double s) { return expm(s * phi); });
    // Swapping the order of integration: Γ₂ = ∫₀¹ (1 - s) exp(sφ) ds.
    const Mat3 g2 = simpson([&](double s) { return Mat3((1.0 - s) * expm(s * phi)); });
    EXPECT_LT((gamma1(phi) - g1).norm(), 1e-8);
    EXPECT_LT((gamma2(phi) - g2).norm(), 1e-8);
    EXPECT_LT((gamma1_inverse(phi) * gamma1(phi) - Mat3::Identity()).norm(), 1e-10);
  }
}

TEST(Gamma, BranchesAgreeAtThreshold) {
  for (double theta : {5e-3, lie::kSeriesThreshold, 2e-2}) {
    const auto a = lie::gamma_coefficients_closed_form(theta);
    const auto b = lie::gamma_coefficients_series(theta);
    EXPECT_NEAR(a.sin_over_theta, b.sin_over_theta, 1e-15);
    EXPECT_NEAR(a.one_minus_cos_over2, b.one_minus_cos_over2, 1e-14);
    EXPECT_NEAR(a.theta_minus_sin_over3, b.theta_minus_sin_over3, 1e-11);
    EXPECT_NEAR(a.gamma2_quadratic, b.gamma2_quadratic, 1e-6);  // closed form cancels badly here
    EXPECT_NEAR(a.jacobian_inverse, b.jacobian_inverse, 1e-10);
  }
  const auto zero = lie::gamma_coefficients(0.0);
  EXPECT_DOUBLE_EQ(zero.sin_over_theta, 1.0);
  EXPECT_DOUBLE_EQ(zero.one_minus_cos_over2, 0.5);
  EXPECT_DOUBLE_EQ(zero.theta_minus_sin_over3, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(zero.gamma2_quadratic, 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(zero.jacobian_inverse, 1.0 / 12.0);
}

TEST(Se23, ExpMatchesMatrixExponential) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec9 xi = random_tangent(rng);
    const Mat5 oracle = se23_hat(xi).exp();
    EXPECT_LT((se23_exp(xi).matrix() - oracle).norm(), 1e-10);
  }
}

TEST(Se23, LogExpRoundTrip) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 500; ++i) {
    const Vec9 xi = random_tangent(rng, std::numbers::pi - 1e-4);
    EXPECT_LT((se23_log(se23_exp(xi)) - xi).norm(), 1e-9);
  }
}

TEST(Se23, GroupOperations) {
  std::mt19937_64 rng(7);
  const ExtendedPose a = random_pose(rng);
  const ExtendedPose b = random_pose(rng);
  EXPECT_LT(((a * b).matrix() - a.matrix() * b.matrix()).norm(), 1e-12);
  EXPECT_LT(((a * a.inverse()).matrix() - Mat5::Identity()).norm(), 1e-12);
  EXPECT_LT((ExtendedPose::FromMatrix(a.matrix()).matrix() - a.matrix()).norm(), 0.0 + 1e-15);
}

TEST(Se23, ConstructorValidates) {
  Mat3 bad = Mat3::Identity() * 1.01;
  EXPECT_THROW(ExtendedPose(bad, Vec3::Zero(), Vec3::Zero()), InvalidArgument);
  EXPECT_THROW(ExtendedPose(Mat3::Identity(), Vec3(NAN, 0, 0), Vec3::Zero()), InvalidArgument);
  // Drift below the input tolerance is absorbed.
  Mat3 drift = Mat3::Identity();
  drift(0, 1) = 1e-8;
  const ExtendedPose p(drift, Vec3::Zero(), Vec3::Zero());
  EXPECT_TRUE(is_rotation(p.rotation(), 1e-12));
}

TEST(Se23, AdjointConjugation) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const ExtendedPose x = random_pose(rng);
    const Vec9 xi = random_tangent(rng);
    const Mat5 lhs = x.matrix() * se23_hat(xi) * x.inverse().matrix();
    EXPECT_LT((lhs - se23_hat(adjoint(x) * xi)).norm(), 1e-10);
  }
}

TEST(Se23, RetractAndInvariantError) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const ExtendedPose x = random_pose(rng);
    const Vec9 xi = random_tangent(rng, 2.0);
    const ExtendedPose y = retract(xi, x);
    EXPECT_LT((y.matrix() - se23_exp(xi).matrix() * x.matrix()).norm(), 1e-12);
    EXPECT_LT((right_invariant_error(y, x) - xi).norm(), 1e-9);
  }
}

TEST(Rotation, Orthonormalize) {
  std::mt19937_64 rng(10);
  const Mat3 r = invio::test::random_rotation(rng);
  Mat3 noisy = r;
  noisy(1, 2) += 1e-4;
  const Mat3 fixed = orthonormalize(noisy);
  EXPECT_TRUE(is_rotation(fixed, 1e-12));
  EXPECT_LT((fixed - r).norm(), 2e-4);
}
