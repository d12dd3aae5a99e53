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

#include <string>

#include "invio/error.hpp"
#include "invio/metrics.hpp"

namespace invio {

ExtendedPose initial_pose(const Dataset& data) {
  if (data.imu.empty()) throw DataError("dataset has no IMU samples");
  if (data.ground_truth.empty()) throw DataError("dataset has no ground truth for the initial state");
  const double t0 = data.imu.front().t;
  return interpolate_ground_truth(data.ground_truth, std::span<const double>(&t0, 1)).front();
}

BlackoutReport blackout_harness(const Dataset& data, const BiasProvider& bias, const VioConfig& config, double start,
                                double duration, Alignment alignment) {
  if (data.imu.size() < 2) throw InvalidArgument("blackout_harness: dataset has fewer than 2 IMU samples");
  if (!data.camera) throw InvalidArgument("blackout_harness: dataset has no camera model");
  const double t0 = data.imu.front().t;
  const double t1 = data.imu.back().t;
  if (!(duration >= 0.0) || !(start >= t0) || !(start + duration <= t1)) {
    throw InvalidArgument("blackout_harness: window [" + std::to_string(start) + ", " +
                          std::to_string(start + duration) + "] s is outside the data span [" + std::to_string(t0) +
                          ", " + std::to_string(t1) + "] s");
  }
  const ExtendedPose x0 = initial_pose(data);
  const Trajectory gt = ground_truth_trajectory(data);

  BlackoutReport out;
  out.start = start;
  out.duration = duration;

  const VioResult nominal = run_vio(data.imu, data.frames, *data.camera, x0, bias, config);
  VioConfig suppressed = config;
  if (duration > 0.0) suppressed.suppress.push_back({start, start + duration});
  const VioResult blackout = run_vio(data.imu, data.frames, *data.camera, x0, bias, suppressed);

  for (const auto& d : blackout.diagnostics) {
    if (d.event == "update" && d.t >= start && d.t < start + duration) ++out.updates_in_window;
  }
  out.nominal_trajectory = to_trajectory(nominal.trajectory);
  out.blackout_trajectory = to_trajectory(blackout.trajectory);
  out.nominal = evaluate(out.nominal_trajectory, gt, alignment);
  out.blackout = evaluate(out.blackout_trajectory, gt, alignment);
  return out;
}

}  // namespace invio
