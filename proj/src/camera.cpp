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

#include "invio/camera.hpp"

#include <cmath>

#include "invio/error.hpp"

namespace invio {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw InvalidArgument("camera: focal lengths must be finite and > 0");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw InvalidArgument("camera: principal point must be finite");
  if (width < 1 || height < 1) throw InvalidArgument("camera: image size must be positive");
  if (!(pixel_sigma > 0.0) || !std::isfinite(pixel_sigma)) throw InvalidArgument("camera: pixel sigma must be > 0");
  if (!is_rotation(body_R_cam, lie::kRotationInputTolerance)) {
    throw InvalidArgument("camera: body_R_cam is not a rotation");
  }
  if (!body_p_cam.allFinite()) throw InvalidArgument("camera: body_p_cam must be finite");
}

Vec3 CameraModel::to_camera(const ExtendedPose& body, const Vec3& landmark) const {
  const Vec3 p_body = body.rotation().transpose() * (landmark - body.position());
  return body_R_cam.transpose() * (p_body - body_p_cam);
}

Vec2 CameraModel::project(const Vec3& p) const {
  if (!(p.z() > 0.0)) throw CheiralityError("camera: point behind the camera");
  return Vec2(fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy);
}

Eigen::Matrix<double, 2, 3> CameraModel::projection_jacobian(const Vec3& p) const {
  const double iz = 1.0 / p.z();
  Eigen::Matrix<double, 2, 3> j;
  // clang-format off
  j << fx * iz,     0.0, -fx * p.x() * iz * iz,
           0.0, fy * iz, -fy * p.y() * iz * iz;
  // clang-format on
  return j;
}

bool CameraModel::in_image(const Vec2& px) const {
  return px.x() >= 0.0 && px.y() >= 0.0 && px.x() < width && px.y() < height;
}

}  // namespace invio
