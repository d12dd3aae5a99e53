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

#include <Eigen/Dense>

#include "invio/dataio.hpp"
#include "invio/metrics.hpp"
#include "invio/vio.hpp"

using namespace invio;

namespace {

SyntheticData noiseless_circle(double duration = 20.0) {
  TrajectorySpec spec;
  spec.duration = duration;
  spec.pixel_noise = 0.0;
  return synthesize(spec);
}

}  // namespace

TEST(Vio, NoiselessClosedLoopTracksGroundTruth) {
  const SyntheticData sim = noiseless_circle();
  const Dataset& d = sim.dataset;
  VioConfig cfg;
  cfg.noise = NoiseParams::EuRoC();
  const VioResult r = run_vio(d.imu, d.frames, *d.camera, initial_pose(d), ConstantBiasProvider(), cfg);
  ASSERT_EQ(r.trajectory.size(), d.imu.size());
  EXPECT_GT(r.updates, 100u);
  double worst = 0.0;
  for (std::size_t k = 0; k < d.imu.size(); ++k) {
    worst = std::max(worst, (r.trajectory[k].pose.position() - d.ground_truth[k].pose.position()).norm());
  }
  EXPECT_LE(worst, 1e-3);
  EXPECT_LE(ate(to_trajectory(r.trajectory), ground_truth_trajectory(d)).translation_rmse, 1e-3);
}

TEST(Vio, BlackoutSuppressesUpdates) {
  const SyntheticData sim = noiseless_circle();
  const Dataset& d = sim.dataset;
  VioConfig cfg;
  cfg.suppress.push_back({5.0, 8.0});
  const VioResult r = run_vio(d.imu, d.frames, *d.camera, initial_pose(d), ConstantBiasProvider(), cfg);
  bool started = false, ended = false;
  for (const auto& rec : r.diagnostics) {
    if (rec.event == "update") EXPECT_FALSE(rec.t >= 5.0 && rec.t < 8.0) << rec.t;
    started |= rec.event == "blackout_start";
    ended |= rec.event == "blackout_end";
  }
  EXPECT_TRUE(started);
  EXPECT_TRUE(ended);
}

TEST(Vio, DeterministicAndBiasSequenceAware) {
  const SyntheticData sim = noiseless_circle(5.0);
  const Dataset& d = sim.dataset;
  const VioConfig cfg;
  const VioResult a = run_vio(d.imu, d.frames, *d.camera, initial_pose(d), ConstantBiasProvider(), cfg);
  const VioResult b = run_vio(d.imu, d.frames, *d.camera, initial_pose(d),
                              SequenceBiasProvider(std::vector<ImuBias>(d.imu.size())), cfg);
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    EXPECT_EQ(a.trajectory[k].pose.matrix(), b.trajectory[k].pose.matrix());
  }
}

TEST(Vio, DiagnosticsSerializeAsJson) {
  DiagnosticRecord rec;
  rec.t = 1.5;
  rec.event = "update";
  rec.accepted = 3;
  const std::string line = to_json_line(rec);
  EXPECT_NE(line.find("\"event\":\"update\""), std::string::npos);
  EXPECT_EQ(line.find('\n'), std::string::npos);
}

TEST(Vio, RecordsCovariance) {
  const SyntheticData sim = noiseless_circle(2.0);
  const Dataset& d = sim.dataset;
  VioConfig cfg;
  cfg.record_covariance = true;
  const VioResult r = run_vio(d.imu, d.frames, *d.camera, initial_pose(d), ConstantBiasProvider(), cfg);
  ASSERT_EQ(r.covariances.size(), r.trajectory.size());
  for (const Mat9& p : r.covariances) {
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat9>(p).eigenvalues().minCoeff(), 0.0);
  }
}
