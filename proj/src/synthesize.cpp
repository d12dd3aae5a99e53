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

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "invio/dataio.hpp"
#include "invio/error.hpp"

namespace invio {

namespace {

struct MotionSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 euler = Vec3::Zero();  // roll, pitch, yaw
  Vec3 euler_rate = Vec3::Zero();
};

Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }

Mat3 attitude(const Vec3& e) { return rot_z(e.z()) * rot_y(e.y()) * rot_x(e.x()); }

// Body angular rate of R = Rz(ψ) Ry(θ) Rx(φ).
Vec3 body_rate(const Vec3& e, const Vec3& rate) {
  const Mat3 rx = rot_x(e.x());
  const Mat3 ry = rot_y(e.y());
  return rate.x() * Vec3::UnitX() + rate.y() * (rx.transpose() * Vec3::UnitY()) +
         rate.z() * ((ry * rx).transpose() * Vec3::UnitZ());
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

// Uniform cubic B-spline over control values spaced `knot` seconds apart.
class Spline {
 public:
  Spline(std::vector<Eigen::Vector4d> controls, double knot) : c_(std::move(controls)), knot_(knot) {}

  // Value, first and second derivative of all four channels.
  void eval(double t, Eigen::Vector4d& x, Eigen::Vector4d& dx, Eigen::Vector4d& ddx) const {
    const double s = std::max(0.0, t / knot_);
    auto i = static_cast<std::size_t>(std::floor(s));
    i = std::min(i, c_.size() - 4);
    const double u = s - static_cast<double>(i);
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double b[4] = {(1 - u) * (1 - u) * (1 - u) / 6.0, (3 * u3 - 6 * u2 + 4) / 6.0,
                         (-3 * u3 + 3 * u2 + 3 * u + 1) / 6.0, u3 / 6.0};
    const double db[4] = {-0.5 * (1 - u) * (1 - u), 1.5 * u2 - 2 * u, -1.5 * u2 + u + 0.5, 0.5 * u2};
    const double ddb[4] = {1 - u, 3 * u - 2, -3 * u + 1, u};
    x.setZero();
    dx.setZero();
    ddx.setZero();
    for (std::size_t j = 0; j < 4; ++j) {
      x += b[j] * c_[i + j];
      dx += db[j] * c_[i + j] / knot_;
      ddx += ddb[j] * c_[i + j] / (knot_ * knot_);
    }
  }

 private:
  std::vector<Eigen::Vector4d> c_;
  double knot_;
};

class Motion {
 public:
  explicit Motion(const TrajectorySpec& spec) : spec_(spec) {
    if (spec.primitive == Primitive::kRandomSpline) {
      auto rng = stream(spec.seed, 0);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      const double knot = 1.0 / std::max(spec.angular_rate, 1e-3);
      const auto count = static_cast<std::size_t>(std::ceil(spec.duration / knot)) + 4;
      std::vector<Eigen::Vector4d> controls;
      for (std::size_t i = 0; i < count; ++i) {
        controls.emplace_back(spec.amplitude * u(rng), spec.amplitude * u(rng),
                              spec.height + 0.1 * spec.amplitude * u(rng), 0.5 * u(rng));
      }
      spline_.emplace(std::move(controls), knot);
    }
  }

  MotionSample at(double t) const {
    const double a = spec_.amplitude;
    const double w = spec_.angular_rate;
    const double h = spec_.height;
    MotionSample m;
    switch (spec_.primitive) {
      case Primitive::kHover:
        m.position = Vec3(0.0, 0.0, h);
        break;
      case Primitive::kLine: {
        const double speed = a * w;
        m.position = Vec3(speed * (t - 0.5 * spec_.duration), 0.0, h);
        m.velocity = Vec3(speed, 0.0, 0.0);
        break;
      }
      case Primitive::kCircle: {
        const double c = std::cos(w * t);
        const double s = std::sin(w * t);
        m.position = Vec3(a * c, a * s, h);
        m.velocity = Vec3(-a * w * s, a * w * c, 0.0);
        m.acceleration = Vec3(-a * w * w * c, -a * w * w * s, 0.0);
        m.euler = Vec3(0.0, 0.0, w * t + 0.5 * std::numbers::pi);
        m.euler_rate = Vec3(0.0, 0.0, w);
        break;
      }
      case Primitive::kLissajous: {
        m.position = Vec3(a * std::sin(w * t), 0.5 * a * std::sin(2 * w * t), h + 0.1 * a * std::sin(3 * w * t));
        m.velocity = Vec3(a * w * std::cos(w * t), a * w * std::cos(2 * w * t), 0.3 * a * w * std::cos(3 * w * t));
        m.acceleration = Vec3(-a * w * w * std::sin(w * t), -2 * a * w * w * std::sin(2 * w * t),
                              -0.9 * a * w * w * std::sin(3 * w * t));
        m.euler = Vec3(0.05 * std::sin(2.3 * w * t), 0.05 * std::sin(1.7 * w * t), 0.5 * std::sin(w * t));
        m.euler_rate = Vec3(0.115 * w * std::cos(2.3 * w * t), 0.085 * w * std::cos(1.7 * w * t),
                            0.5 * w * std::cos(w * t));
        break;
      }
      case Primitive::kRandomSpline: {
        Eigen::Vector4d x, dx, ddx;
        spline_->eval(t, x, dx, ddx);
        m.position = x.head<3>();
        m.velocity = dx.head<3>();
        m.acceleration = ddx.head<3>();
        m.euler = Vec3(0.0, 0.0, x(3));
        m.euler_rate = Vec3(0.0, 0.0, dx(3));
        break;
      }
    }
    return m;
  }

 private:
  TrajectorySpec spec_;
  std::optional<Spline> spline_;
};

}  // namespace

Mat3 downward_camera_rotation() { return Vec3(1.0, -1.0, -1.0).asDiagonal(); }

TrajectorySpec::TrajectorySpec() { camera.body_R_cam = downward_camera_rotation(); }

void TrajectorySpec::validate() const {
  if (!(imu_rate > 0.0) || !(camera_rate > 0.0)) throw InvalidArgument("trajectory: rates must be > 0");
  const double stride = imu_rate / camera_rate;
  if (std::abs(stride - std::round(stride)) > 1e-9 || std::round(stride) < 1.0) {
    throw InvalidArgument("trajectory: camera_rate must divide imu_rate");
  }
  if (!(duration > 0.0)) throw InvalidArgument("trajectory: duration must be > 0");
  if (!(amplitude >= 0.0) || !(angular_rate >= 0.0)) throw InvalidArgument("trajectory: amplitude and rate >= 0");
  if (!(height > 0.0)) throw InvalidArgument("trajectory: height must be > 0");
  if (landmark_count < 0 || !(landmark_margin >= 0.0) || !(landmark_depth >= 0.0)) {
    throw InvalidArgument("trajectory: landmark count, margin and depth must be >= 0");
  }
  if (!(pixel_noise >= 0.0)) throw InvalidArgument("trajectory: pixel_noise must be >= 0");
  if (!bias.gyro.allFinite() || !bias.accel.allFinite() || !bias_drift_rate.gyro.allFinite() ||
      !bias_drift_rate.accel.allFinite()) {
    throw InvalidArgument("trajectory: bias values must be finite");
  }
  noise.validate();
  camera.validate();
}

SyntheticData synthesize(const TrajectorySpec& spec) {
  spec.validate();
  const Motion motion(spec);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.imu_rate)) + 1;
  const auto stride = static_cast<std::size_t>(std::llround(spec.imu_rate / spec.camera_rate));

  SyntheticData out;
  Dataset& data = out.dataset;
  data.camera = spec.camera;
  data.imu.resize(n);
  data.ground_truth.resize(n);
  data.true_bias.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    data.imu[k].t = data.to_seconds(std::llround(static_cast<double>(k) * 1e9 / spec.imu_rate));
  }

  auto noise_rng = stream(spec.seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sg = spec.noise.sigma_g * std::sqrt(spec.imu_rate);
  const double sa = spec.noise.sigma_a * std::sqrt(spec.imu_rate);

  const MotionSample m0 = motion.at(0.0);
  ExtendedPose state(attitude(m0.euler), m0.velocity, m0.position);
  ImuBias walk = spec.bias;
  const NoiseParams& g = spec.noise;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = data.imu[k].t;
    const double dt = k + 1 < n ? data.imu[k + 1].t - t : data.imu[k].t - data.imu[k - 1].t;

    ImuBias b;
    switch (spec.bias_profile) {
      case BiasProfile::kZero:
        break;
      case BiasProfile::kConstant:
        b = spec.bias;
        break;
      case BiasProfile::kLinearDrift:
        b.gyro = spec.bias.gyro + spec.bias_drift_rate.gyro * t;
        b.accel = spec.bias.accel + spec.bias_drift_rate.accel * t;
        break;
      case BiasProfile::kRandomWalk:
        b = walk;
        for (int i = 0; i < 3; ++i) walk.gyro(i) += g.sigma_bg * std::sqrt(dt) * normal(noise_rng);
        for (int i = 0; i < 3; ++i) walk.accel(i) += g.sigma_ba * std::sqrt(dt) * normal(noise_rng);
        break;
    }

    // Inputs held over [t, t+dt) are the analytic values at the midpoint.
    const MotionSample mid = motion.at(t + 0.5 * dt);
    const Mat3 r_mid = attitude(mid.euler);
    ImuSample clean;
    clean.t = t;
    clean.omega = body_rate(mid.euler, mid.euler_rate);
    clean.accel = r_mid.transpose() * (mid.acceleration - g.gravity);

    ImuSample& meas = data.imu[k];
    meas.omega = clean.omega + b.gyro;
    meas.accel = clean.accel + b.accel;
    for (int i = 0; i < 3; ++i) meas.omega(i) += sg * normal(noise_rng);
    for (int i = 0; i < 3; ++i) meas.accel(i) += sa * normal(noise_rng);

    data.true_bias[k] = b;
    data.ground_truth[k] = {t, state, b};
    if (k + 1 < n) state = propagate_state(state, clean, ImuBias::Zero(), dt, g);
  }

  // Landmarks in a slab below the flight envelope.
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& s : data.ground_truth) {
    lo = lo.cwiseMin(s.pose.position());
    hi = hi.cwiseMax(s.pose.position());
  }
  auto landmark_rng = stream(spec.seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.landmarks.reserve(static_cast<std::size_t>(spec.landmark_count));
  for (int i = 0; i < spec.landmark_count; ++i) {
    const double x = lo.x() - spec.landmark_margin + unit(landmark_rng) * (hi.x() - lo.x() + 2 * spec.landmark_margin);
    const double y = lo.y() - spec.landmark_margin + unit(landmark_rng) * (hi.y() - lo.y() + 2 * spec.landmark_margin);
    const double z = -spec.landmark_depth * unit(landmark_rng);
    out.landmarks.emplace_back(x, y, z);
  }

  auto pixel_rng = stream(spec.seed, 3);
  for (std::size_t k = 0; k < n; k += stride) {
    FrameObservations frame;
    frame.t = data.imu[k].t;
    for (std::size_t id = 0; id < out.landmarks.size(); ++id) {
      const Vec3 p_cam = spec.camera.to_camera(data.ground_truth[k].pose, out.landmarks[id]);
      if (p_cam.z() < 0.1) continue;
      Vec2 px = spec.camera.project(p_cam);
      if (!spec.camera.in_image(px)) continue;
      if (spec.pixel_noise > 0.0) px += spec.pixel_noise * Vec2(normal(pixel_rng), normal(pixel_rng));
      frame.features.emplace_back(static_cast<long>(id), px);
    }
    data.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace invio
