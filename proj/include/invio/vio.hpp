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

#include <span>
#include <string>
#include <vector>

#include "invio/msckf.hpp"

namespace invio {

/// Source of the bias subtracted from sample k before propagation.
class BiasProvider {
 public:
  virtual ~BiasProvider() = default;
  virtual ImuBias bias(std::size_t k) const = 0;
};

/// The zero-bias (or any fixed bias) baseline.
class ConstantBiasProvider : public BiasProvider {
 public:
  explicit ConstantBiasProvider(const ImuBias& bias = ImuBias::Zero()) : bias_(bias) {}
  ImuBias bias(std::size_t) const override { return bias_; }

 private:
  ImuBias bias_;
};

/// Per-sample biases computed ahead of time, e.g. by predict_bias_stream.
class SequenceBiasProvider : public BiasProvider {
 public:
  explicit SequenceBiasProvider(std::vector<ImuBias> biases) : biases_(std::move(biases)) {}
  ImuBias bias(std::size_t k) const override;
  std::size_t size() const { return biases_.size(); }

 private:
  std::vector<ImuBias> biases_;
};

/// Time interval during which camera frames are ignored.
struct BlackoutWindow {
  double start = 0.0;
  double end = 0.0;
  bool contains(double t) const { return t >= start && t < end; }
};

struct VioConfig {
  NoiseParams noise;
  std::size_t max_clones = 11;
  std::size_t min_track_length = 3;
  bool chi2_gating = false;
  double gate_probability = 0.95;
  double max_reprojection_rms_px = 5.0;
  double max_imu_gap = 0.05;    // seconds; larger gaps are reported
  double max_frame_gap = 0.5;
  Vec9 initial_variances = default_initial_variances();
  TriangulationConfig triangulation;
  std::vector<BlackoutWindow> suppress;
  bool record_covariance = false;

  void validate() const;
};

/// One line of the run log.
struct DiagnosticRecord {
  double t = 0.0;
  std::string event;  // update, visual_gap, imu_gap, blackout_start, blackout_end, frame_unmatched
  double innovation_norm = 0.0;
  int accepted = 0;
  int rejected = 0;
  std::size_t clones = 0;
  std::string detail;
};

std::string to_json_line(const DiagnosticRecord& record);

struct StampedPose {
  double t = 0.0;
  ExtendedPose pose;
};

struct VioResult {
  std::vector<StampedPose> trajectory;  // one entry per IMU sample
  std::vector<Mat9> covariances;        // current-pose block, if recorded
  std::vector<DiagnosticRecord> diagnostics;
  std::size_t updates = 0;
  std::size_t features_used = 0;
  std::size_t features_rejected = 0;
};

/// Filters the IMU stream, processing each camera frame at the IMU sample
/// it coincides with (within half a sample period). For every frame: if the
/// window is full, tracks seen in the oldest clone are used and dropped;
/// a clone is added; tracks that were not re-observed are used. Frames
/// inside a blackout window are ignored and all open tracks are discarded.
VioResult run_vio(std::span<const ImuSample> imu, std::span<const FrameObservations> frames,
                  const CameraModel& camera, const ExtendedPose& initial_pose, const BiasProvider& bias,
                  const VioConfig& config);

}  // namespace invio
