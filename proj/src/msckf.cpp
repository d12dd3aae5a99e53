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

#include "invio/msckf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <string>

#include "invio/error.hpp"

namespace invio {

Vec9 default_initial_variances() {
  Vec9 v;
  v << Vec3::Constant(1e-4), Vec3::Constant(1e-2), Vec3::Constant(1e-4);
  return v;
}

FilterState make_filter_state(double t, const ExtendedPose& pose, const Vec9& variances) {
  if (!(variances.array() >= 0.0).all() || !variances.allFinite()) {
    throw InvalidArgument("filter: initial variances must be finite and >= 0");
  }
  FilterState s;
  s.t = t;
  s.pose = pose;
  s.cov = variances.asDiagonal();
  return s;
}

void propagate(FilterState& state, const ImuSample& sample, const ImuBias& bias, double dt, const NoiseParams& noise) {
  const Mat9 current = state.cov.topLeftCorner<9, 9>();
  const Mat9 next = propagate_covariance(current, state.pose, dt, noise);
  const Mat9 phi = invariant_transition(dt, noise);
  state.pose = propagate_state(state.pose, sample, bias, dt, noise);
  state.cov.topLeftCorner<9, 9>() = next;
  const Eigen::Index rest = state.dim() - 9;
  if (rest > 0) {
    const Eigen::MatrixXd cross = phi * state.cov.topRightCorner(9, rest);
    state.cov.topRightCorner(9, rest) = cross;
    state.cov.bottomLeftCorner(rest, 9) = cross.transpose();
  }
  state.t += dt;
}

void marginalize_oldest_clone(FilterState& state) {
  if (state.clones.empty()) throw InvalidArgument("filter: no clone to marginalize");
  const Eigen::Index n = state.dim();
  Eigen::MatrixXd cov(n - 9, n - 9);
  cov.topLeftCorner(9, 9) = state.cov.topLeftCorner(9, 9);
  cov.topRightCorner(9, n - 18) = state.cov.topRightCorner(9, n - 18);
  cov.bottomLeftCorner(n - 18, 9) = state.cov.bottomLeftCorner(n - 18, 9);
  cov.bottomRightCorner(n - 18, n - 18) = state.cov.bottomRightCorner(n - 18, n - 18);
  state.cov = std::move(cov);
  state.clones.erase(state.clones.begin());
}

void augment_clone(FilterState& state, long frame, std::size_t max_clones) {
  if (max_clones < 1) throw InvalidArgument("filter: max_clones must be >= 1");
  while (state.clones.size() >= max_clones) marginalize_oldest_clone(state);
  const Eigen::Index n = state.dim();
  Eigen::MatrixXd cov(n + 9, n + 9);
  cov.topLeftCorner(n, n) = state.cov;
  cov.bottomLeftCorner(9, n) = state.cov.topRows(9);
  cov.topRightCorner(n, 9) = state.cov.leftCols(9);
  cov.bottomRightCorner(9, 9) = state.cov.topLeftCorner(9, 9);
  state.cov = std::move(cov);
  state.clones.push_back(Clone{state.t, frame, state.pose});
}

FeatureJacobian feature_jacobian(const FeatureTrack& track, const FilterState& state, const Vec3& landmark,
                                 const CameraModel& camera) {
  const auto m = static_cast<Eigen::Index>(track.observations.size());
  FeatureJacobian jac;
  jac.h_x = Eigen::MatrixXd::Zero(2 * m, state.dim());
  jac.h_l.resize(2 * m, 3);
  jac.residual.resize(2 * m);
  const Mat3 cam_r_body = camera.body_R_cam.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    const FeatureObservation& o = track.observations[static_cast<std::size_t>(i)];
    if (o.clone >= state.clones.size()) throw InvalidArgument("feature_jacobian: observation refers to a missing clone");
    const ExtendedPose& pose = state.clones[o.clone].pose;
    const Vec3 p_cam = camera.to_camera(pose, landmark);
    const Eigen::Matrix<double, 2, 3> j_proj = camera.projection_jacobian(p_cam) * cam_r_body;
    const Mat3 rt = pose.rotation().transpose();
    const Eigen::Index col = 9 * (1 + static_cast<Eigen::Index>(o.clone));
    // Left perturbation X = exp(ξ) X̂ moves the body-frame point by
    // R̂ᵀ(ℓ)× δφ - R̂ᵀ δp.
    jac.h_x.block<2, 3>(2 * i, col) = j_proj * rt * hat(landmark);
    jac.h_x.block<2, 3>(2 * i, col + 6) = -j_proj * rt;
    jac.h_l.middleRows<2>(2 * i) = j_proj * rt;
    jac.residual.segment<2>(2 * i) = o.pixel - camera.project(p_cam);
  }
  return jac;
}

ProjectedMeasurement nullspace_project(const FeatureJacobian& jac) {
  const Eigen::Index rows = jac.h_l.rows();
  if (rows < 4) throw DegenerateGeometry("nullspace_project: need at least two observations");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(jac.h_l);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(3).triangularView<Eigen::Upper>();
  const double scale = std::max(1e-300, jac.h_l.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i) {
    if (std::abs(r(i, i)) < 1e-9 * scale) throw DegenerateGeometry("nullspace_project: landmark Jacobian is rank deficient");
  }
  const Eigen::MatrixXd qt_h = qr.householderQ().transpose() * jac.h_x;
  const Eigen::VectorXd qt_r = qr.householderQ().transpose() * jac.residual;
  return {qt_h.bottomRows(rows - 3), qt_r.tail(rows - 3)};
}

double mahalanobis(const FilterState& state, const ProjectedMeasurement& m, double pixel_sigma) {
  Eigen::MatrixXd s = m.h * state.cov * m.h.transpose();
  s.diagonal().array() += pixel_sigma * pixel_sigma;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericError("mahalanobis: innovation covariance not positive definite");
  return m.residual.dot(llt.solve(m.residual));
}

double chi2_quantile(double probability, double dof) {
  if (!(probability > 0.0 && probability < 1.0) || !(dof > 0.0)) {
    throw InvalidArgument("chi2_quantile: need 0 < p < 1 and dof > 0");
  }
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), probability);
}

UpdateOutcome ekf_update(FilterState& state, const Eigen::MatrixXd& h_in, const Eigen::VectorXd& r_in,
                         double pixel_sigma) {
  const Eigen::Index n = state.dim();
  if (h_in.cols() != n || h_in.rows() != r_in.size()) throw InvalidArgument("ekf_update: measurement shape mismatch");
  if (!(pixel_sigma > 0.0)) throw InvalidArgument("ekf_update: pixel sigma must be > 0");
  UpdateOutcome outcome;
  outcome.innovation_norm = r_in.norm();
  if (h_in.rows() == 0) return outcome;

  Eigen::MatrixXd h = h_in;
  Eigen::VectorXd r = r_in;
  if (h.rows() > n) {
    // Isotropic noise is invariant under the orthogonal Qᵀ.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(h);
    r = (qr.householderQ().transpose() * r).head(n).eval();
    h = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  }
  outcome.rows = h.rows();

  const double var = pixel_sigma * pixel_sigma;
  const Eigen::MatrixXd ph = state.cov * h.transpose();
  Eigen::MatrixXd s = h * ph;
  s.diagonal().array() += var;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw NumericError("ekf_update: innovation covariance not positive definite");
  const Eigen::MatrixXd k = llt.solve(ph.transpose()).transpose();
  const Eigen::VectorXd delta = k * r;
  if (!delta.allFinite()) throw NumericError("ekf_update: non-finite correction");

  // Joseph form on a square-root factor P = F Fᵀ: (I-KH)F is a Gram factor,
  // so rounding cannot push eigenvalues below zero even when P is exactly
  // singular (a fresh clone duplicates the current state).
  Eigen::MatrixXd ikh = -k * h;
  ikh.diagonal().array() += 1.0;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(state.cov);
  const Eigen::VectorXd root = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd factor = Eigen::MatrixXd(ldlt.matrixL()) * root.asDiagonal();
  factor = ldlt.transpositionsP().transpose() * factor;
  const Eigen::MatrixXd m = ikh * factor;
  Eigen::MatrixXd cov = m * m.transpose() + var * (k * k.transpose());
  state.cov = 0.5 * (cov + cov.transpose());

  state.pose = retract(delta.head<9>(), state.pose);
  for (std::size_t c = 0; c < state.clones.size(); ++c) {
    const Vec9 d = delta.segment<9>(9 * (1 + static_cast<Eigen::Index>(c)));
    state.clones[c].pose = retract(d, state.clones[c].pose);
  }
  return outcome;
}

}  // namespace invio
