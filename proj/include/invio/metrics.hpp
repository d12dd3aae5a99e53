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

#include <string>
#include <vector>

#include "invio/dataio.hpp"
#include "invio/vio.hpp"

namespace invio {

enum class Alignment {
  kNone,
  kSE3,     // rotation + translation (Umeyama, no scale)
  kPosYaw,  // yaw + translation
};

Alignment parse_alignment(const std::string& name);
std::string to_string(Alignment alignment);

struct AteResult {
  double translation_rmse = 0.0;   // m
  double rotation_rmse_deg = 0.0;  // deg
  std::size_t pairs = 0;
};

/// Nearest-neighbour association within `tolerance` seconds; a negative
/// tolerance selects half the coarser stream's median period.
std::vector<std::pair<std::size_t, std::size_t>> associate(const Trajectory& est, const Trajectory& gt,
                                                           double tolerance = -1.0);

/// Throws InsufficientData for fewer than two associated pairs.
AteResult ate(const Trajectory& est, const Trajectory& gt, Alignment alignment = Alignment::kPosYaw,
              double tolerance = -1.0);

/// Rigid transform (R, t) applied to `est` by the chosen alignment.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};
RigidTransform align(const std::vector<Vec3>& est, const std::vector<Vec3>& gt, Alignment alignment);

struct RelativeErrorStats {
  double fraction = 0.0;  // requested fraction
  double length = 0.0;    // sub-trajectory length, m
  bool missing = false;   // trajectory too short for this length
  std::vector<double> samples;
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct RelativeErrorOptions {
  std::vector<double> fractions = {0.025, 0.05, 0.075, 0.10};
  /// Distance the fractions refer to; ≤ 0 uses the ground truth's own
  /// travelled distance.
  double reference_distance = 0.0;
  double tolerance = -1.0;
};

/// End-point translation error of every sub-trajectory of each length after
/// aligning its start pose. Throws InsufficientData when no length fits.
std::vector<RelativeErrorStats> relative_error(const Trajectory& est, const Trajectory& gt,
                                               const RelativeErrorOptions& options = {});

struct MetricReport {
  AteResult ate;
  std::vector<RelativeErrorStats> relative;
};

MetricReport evaluate(const Trajectory& est, const Trajectory& gt, Alignment alignment = Alignment::kPosYaw,
                      const RelativeErrorOptions& options = {});

/// JSON object with the ATE numbers and per-fraction summaries.
std::string to_json(const MetricReport& report);
/// "key: value" lines.
std::string to_text(const MetricReport& report);

Trajectory to_trajectory(const std::vector<StampedPose>& poses);

struct BlackoutReport {
  double start = 0.0;
  double duration = 0.0;
  MetricReport nominal;
  MetricReport blackout;
  Trajectory nominal_trajectory;
  Trajectory blackout_trajectory;
  std::size_t updates_in_window = 0;
};

/// Runs the filter with and without a camera blackout of `duration`
/// seconds starting at `start`. Throws InvalidArgument when the window does
/// not lie inside the IMU span.
BlackoutReport blackout_harness(const Dataset& data, const BiasProvider& bias, const VioConfig& config, double start,
                                double duration, Alignment alignment = Alignment::kPosYaw);

/// Initial state for a run: ground truth at the first IMU sample.
ExtendedPose initial_pose(const Dataset& data);

}  // namespace invio
