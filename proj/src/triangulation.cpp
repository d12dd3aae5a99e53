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

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/QR>

#include "invio/error.hpp"
#include "invio/msckf.hpp"

namespace invio {

namespace {

struct View {
  Mat3 r_ia;  // anchor camera -> camera i
  Vec3 t_ia;
  Vec2 m;     // normalized image coordinates
};

// Pixel residuals and Jacobian w.r.t. (α, β, ρ). Returns false if any
// predicted point is not in front of its camera.
bool linearize(const std::vector<View>& views, const Vec3& x, const CameraModel& cam, Eigen::VectorXd& r,
               Eigen::MatrixXd* j) {
  const Vec3 ray(x(0), x(1), 1.0);
  r.resize(2 * static_cast<Eigen::Index>(views.size()));
  if (j) j->resize(r.size(), 3);
  for (std::size_t i = 0; i < views.size(); ++i) {
    const View& v = views[i];
    const Vec3 h = v.r_ia * ray + x(2) * v.t_ia;
    if (!(h.z() > 0.0)) return false;
    const auto row = static_cast<Eigen::Index>(2 * i);
    r(row) = cam.fx * (v.m.x() - h.x() / h.z());
    r(row + 1) = cam.fy * (v.m.y() - h.y() / h.z());
    if (j) {
      Eigen::Matrix<double, 2, 3> dpred;
      // clang-format off
      dpred << cam.fx / h.z(),            0.0, -cam.fx * h.x() / (h.z() * h.z()),
                          0.0, cam.fy / h.z(), -cam.fy * h.y() / (h.z() * h.z());
      // clang-format on
      Mat3 dh;
      dh << v.r_ia.col(0), v.r_ia.col(1), v.t_ia;
      j->middleRows(row, 2) = -dpred * dh;
    }
  }
  return true;
}

}  // namespace

TriangulationResult triangulate(const FeatureTrack& track, std::span<const Clone> clones, const CameraModel& camera,
                                const TriangulationConfig& config) {
  const auto& obs = track.observations;
  if (obs.size() < 2) throw DegenerateGeometry("triangulate: track " + std::to_string(track.id) + " has < 2 views");
  for (const auto& o : obs) {
    if (o.clone >= clones.size()) throw InvalidArgument("triangulate: observation refers to a missing clone");
  }

  const ExtendedPose& anchor = clones[obs.front().clone].pose;
  const Mat3 r_wa = camera.world_R_cam(anchor);
  const Vec3 p_wa = camera.world_p_cam(anchor);

  std::vector<View> views;
  views.reserve(obs.size());
  std::vector<Vec3> bearings;
  Eigen::MatrixXd a(3 * obs.size(), 3);
  Eigen::VectorXd y(3 * obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const ExtendedPose& body = clones[obs[i].clone].pose;
    const Mat3 r_wc = camera.world_R_cam(body);
    const Vec3 p_wc = camera.world_p_cam(body);
    View v;
    v.m = Vec2((obs[i].pixel.x() - camera.cx) / camera.fx, (obs[i].pixel.y() - camera.cy) / camera.fy);
    v.r_ia = r_wc.transpose() * r_wa;
    v.t_ia = r_wc.transpose() * (p_wa - p_wc);
    views.push_back(v);

    const Vec3 b = (r_wc * Vec3(v.m.x(), v.m.y(), 1.0)).normalized();
    bearings.push_back(b);
    const Mat3 skew = hat(b);
    a.middleRows(static_cast<Eigen::Index>(3 * i), 3) = skew;
    y.segment<3>(static_cast<Eigen::Index>(3 * i)) = skew * p_wc;
  }

  double parallax = 0.0;
  for (std::size_t i = 0; i < bearings.size(); ++i) {
    for (std::size_t k = i + 1; k < bearings.size(); ++k) {
      parallax = std::max(parallax, std::atan2(bearings[i].cross(bearings[k]).norm(), bearings[i].dot(bearings[k])));
    }
  }
  if (parallax < config.min_parallax_rad) {
    throw DegenerateGeometry("triangulate: track " + std::to_string(track.id) + " parallax " +
                             std::to_string(parallax) + " rad below threshold");
  }

  const Vec3 linear = a.colPivHouseholderQr().solve(y);
  const Vec3 in_anchor = r_wa.transpose() * (linear - p_wa);
  if (!in_anchor.allFinite() || !(in_anchor.z() > 0.0)) {
    throw CheiralityError("triangulate: track " + std::to_string(track.id) + " initializes behind the anchor camera");
  }

  Vec3 x(in_anchor.x() / in_anchor.z(), in_anchor.y() / in_anchor.z(), 1.0 / in_anchor.z());
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  if (!linearize(views, x, camera, r, &j)) {
    throw CheiralityError("triangulate: track " + std::to_string(track.id) + " initializes behind a camera");
  }
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  TriangulationResult result;
  bool converged = false;
  for (int it = 1; it <= config.max_iterations && !converged; ++it) {
    result.iterations = it;
    const Mat3 jtj = j.transpose() * j;
    const Vec3 g = j.transpose() * r;
    // Levenberg-Marquardt damping on the diagonal; undamped near the optimum.
    for (int attempt = 0; attempt < 10; ++attempt) {
      Mat3 damped = jtj;
      damped.diagonal() *= 1.0 + lambda;
      const Vec3 step = -damped.ldlt().solve(g);
      const Vec3 candidate = x + step;
      Eigen::VectorXd r_new;
      Eigen::MatrixXd j_new;
      if (linearize(views, candidate, camera, r_new, &j_new) && r_new.squaredNorm() <= cost) {
        x = candidate;
        r = r_new;
        j = j_new;
        cost = r.squaredNorm();
        lambda = std::max(lambda * 0.1, 1e-12);
        converged = step.norm() < config.step_tolerance * (1.0 + x.norm());
        break;
      }
      lambda *= 10.0;
      if (step.norm() < config.step_tolerance * (1.0 + x.norm())) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("triangulate: track " + std::to_string(track.id) + " did not converge in " +
                           std::to_string(config.max_iterations) + " iterations");
  }

  const double rho = x(2);
  const Vec3 ray(x(0), x(1), 1.0);
  for (const View& v : views) {
    const Vec3 h = v.r_ia * ray + rho * v.t_ia;
    if (!(rho > 0.0) || !(h.z() / rho >= config.min_depth)) {
      throw CheiralityError("triangulate: track " + std::to_string(track.id) + " converged behind a camera");
    }
  }
  result.landmark = p_wa + r_wa * ray / rho;
  result.rms_residual_px = std::sqrt(cost / static_cast<double>(r.size()));
  return result;
}

}  // namespace invio
