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

#include <utility>
#include <vector>

#include "invio/liegroup.hpp"

namespace invio {

using Vec2 = Eigen::Vector2d;

/// Pinhole camera rigidly mounted on the body. body_R_cam / body_p_cam map
/// camera coordinates into the body frame.
struct CameraModel {
  double fx = 458.654;
  double fy = 457.296;
  double cx = 367.215;
  double cy = 248.375;
  int width = 752;
  int height = 480;
  Mat3 body_R_cam = Mat3::Identity();
  Vec3 body_p_cam = Vec3::Zero();
  double pixel_sigma = 1.0;

  /// Throws InvalidArgument for non-positive focal lengths/size/sigma or a
  /// non-rotation extrinsic.
  void validate() const;

  /// Landmark in camera coordinates for a body pose.
  Vec3 to_camera(const ExtendedPose& body, const Vec3& landmark) const;

  /// Pixel of a camera-frame point; throws CheiralityError when z ≤ 0.
  Vec2 project(const Vec3& p_cam) const;

  /// 2x3 derivative of project() at p_cam.
  Eigen::Matrix<double, 2, 3> projection_jacobian(const Vec3& p_cam) const;

  bool in_image(const Vec2& pixel) const;

  /// World pose of the camera centre and orientation for a body pose.
  Mat3 world_R_cam(const ExtendedPose& body) const { return body.rotation() * body_R_cam; }
  Vec3 world_p_cam(const ExtendedPose& body) const { return body.position() + body.rotation() * body_p_cam; }
};

/// Features observed in one camera frame: (track id, pixel).
struct FrameObservations {
  double t = 0.0;
  std::vector<std::pair<long, Vec2>> features;
};

}  // namespace invio
