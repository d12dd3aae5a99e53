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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "invio/config.hpp"
#include "invio/error.hpp"
#include "invio/metrics.hpp"

namespace invio::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumeric = 4,
  kExitDiverged = 5,
};

/// Exit code for a library error class.
int exit_code(const Error& error);

struct SimulateOptions {
  fs::path spec;  // empty: default spec
  fs::path out;
  std::optional<std::uint64_t> seed;
};

/// Writes imu0/data.csv, state_groundtruth_estimate0/data.csv, tracks.txt,
/// camera.json, true_bias.csv, groundtruth.tum and provenance.json.
SyntheticData cmd_simulate(const SimulateOptions& options);

struct TrainOptions {
  std::vector<fs::path> train_dirs;
  std::vector<fs::path> validation_dirs;
  fs::path config;  // empty: defaults
  fs::path checkpoint_out;
  fs::path loss_trace;  // empty: <checkpoint>.loss.csv
  fs::path resume;      // empty: fresh initialization
  std::optional<int> epochs;
};

TrainResult cmd_train(const TrainOptions& options, std::ostream& log);

struct RunOptions {
  fs::path dataset;
  fs::path checkpoint;
  bool zero_bias = false;
  fs::path config;
  fs::path tracks;  // empty: <dataset>/<paths.tracks>
  fs::path out;
};

/// Writes trajectory.tum, diagnostics.jsonl and run.json into `out`, plus
/// metrics.json when the dataset has ground truth.
VioResult cmd_run(const RunOptions& options, std::ostream& log);

struct EvalOptions {
  fs::path estimate;      // TUM file
  fs::path ground_truth;  // TUM file or EuRoC directory
  Alignment alignment = Alignment::kPosYaw;
  RelativeErrorOptions relative;
  fs::path json_out;  // empty: none
};

MetricReport cmd_eval(const EvalOptions& options, std::ostream& out);

struct BlackoutOptions {
  fs::path dataset;
  fs::path checkpoint;
  bool zero_bias = false;
  fs::path config;
  fs::path tracks;
  std::vector<double> durations = {1.0, 2.0, 3.0, 4.0};
  std::optional<double> start;  // seconds after the first IMU sample; default centres the longest window
  fs::path out;
  Alignment alignment = Alignment::kPosYaw;
};

std::vector<BlackoutReport> cmd_blackout(const BlackoutOptions& options, std::ostream& out);

// Shared helpers, exposed for tests.

/// Ground-truth-supervised training segments of one dataset.
std::vector<TrainSegment> dataset_segments(const Dataset& data, int window);

/// EuRoC directory plus camera.json and tracks. The camera comes from the
/// config when given, else from <dir>/camera.json.
Dataset load_run_dataset(const fs::path& dir, const RunConfig& config, const fs::path& tracks_override);

/// Trajectory whose stamps are absolute seconds (origin added).
Trajectory absolute_trajectory(const Trajectory& relative, std::int64_t time_origin_ns);

}  // namespace invio::cli
