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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "invio/camera.hpp"
#include "invio/inertial.hpp"

namespace invio {

struct GroundTruthState {
  double t = 0.0;
  ExtendedPose pose;
  ImuBias bias;  // diagnostics only
};

/// Time-aligned sensor data. Every `t` is seconds since `time_origin_ns`,
/// which keeps nanosecond stamps exact for absolute epochs.
struct Dataset {
  std::int64_t time_origin_ns = 0;
  std::vector<ImuSample> imu;
  std::vector<GroundTruthState> ground_truth;
  std::vector<FrameObservations> frames;
  std::optional<CameraModel> camera;
  std::vector<ImuBias> true_bias;  // per IMU sample, synthetic data only

  double to_seconds(std::int64_t ns) const { return static_cast<double>(ns - time_origin_ns) * 1e-9; }
  std::int64_t to_ns(double t) const;
};

/// Reads `imu0/data.csv` and `state_groundtruth_estimate0/data.csv` from
/// `dir` or `dir/mav0`. The time origin is the first IMU stamp. Throws
/// ParseError (with line) for malformed rows or non-finite fields, DataError
/// for non-increasing stamps, IoError for missing files.
Dataset load_euroc(const std::filesystem::path& dir, bool require_ground_truth = true);

/// Writes the two EuRoC CSVs (17-digit values) under `dir`.
void write_euroc(const Dataset& data, const std::filesystem::path& dir);

/// Ground truth at arbitrary times: slerp on rotation, linear on velocity
/// and position. Throws DataError for times outside the ground-truth span.
std::vector<ExtendedPose> interpolate_ground_truth(std::span<const GroundTruthState> gt, std::span<const double> times);

// Feature tracks: text lines "frame_ns feature_id u v".
struct TrackPoint {
  std::int64_t frame_ns = 0;
  Vec2 pixel = Vec2::Zero();
};
using TrackTable = std::map<long, std::vector<TrackPoint>>;  // per id, ordered by frame

/// Throws ParseError (with line) for malformed lines, DataError for a
/// repeated (frame, id) pair and IoError when the file cannot be read.
TrackTable load_tracks(const std::filesystem::path& path);

/// Regroups tracks into frames ordered by time, features ordered by id.
std::vector<FrameObservations> frames_from_tracks(const TrackTable& tracks, std::int64_t time_origin_ns);

void write_tracks(const std::filesystem::path& path, std::span<const FrameObservations> frames,
                  std::int64_t time_origin_ns);

// TUM trajectories: "t px py pz qx qy qz qw".
struct PoseSample {
  double t = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
};
using Trajectory = std::vector<PoseSample>;

/// `time_origin_ns` is added to every stamp so files carry absolute time.
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory,
                      std::int64_t time_origin_ns = 0);
Trajectory read_trajectory(const std::filesystem::path& path);

Trajectory ground_truth_trajectory(const Dataset& data);

// Synthetic generator.
enum class Primitive { kHover, kLine, kCircle, kLissajous, kRandomSpline };
enum class BiasProfile { kZero, kConstant, kLinearDrift, kRandomWalk };

struct TrajectorySpec {
  Primitive primitive = Primitive::kCircle;
  double amplitude = 2.0;      // m: circle radius, Lissajous/spline extent, line speed per rad/s
  double angular_rate = 0.5;   // rad/s
  double height = 2.0;         // m above the landmark floor
  double duration = 30.0;      // s
  double imu_rate = 200.0;     // Hz
  double camera_rate = 20.0;   // Hz, must divide imu_rate
  BiasProfile bias_profile = BiasProfile::kZero;
  ImuBias bias;                // constant value, or start value for drift/walk
  ImuBias bias_drift_rate;     // per second, linear drift
  NoiseParams noise = NoiseParams::Noiseless();
  double pixel_noise = 0.0;    // px
  int landmark_count = 600;
  double landmark_margin = 4.0;  // m added around the motion footprint
  double landmark_depth = 1.0;   // m, thickness of the landmark slab
  CameraModel camera;            // extrinsic defaults to downward-looking
  std::uint64_t seed = 0;

  TrajectorySpec();
  void validate() const;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<Vec3> landmarks;
};

/// Inputs are evaluated from the analytic trajectory at interval midpoints
/// and ground truth is integrated from them with the closed-form step, so a
/// noiseless rollout with the true bias reproduces it exactly.
SyntheticData synthesize(const TrajectorySpec& spec);

/// Camera looking along the body -z axis.
Mat3 downward_camera_rotation();

}  // namespace invio
