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
#include <optional>
#include <string>
#include <string_view>

#include "invio/bias_net.hpp"
#include "invio/dataio.hpp"
#include "invio/train.hpp"
#include "invio/vio.hpp"

namespace invio {

/// Everything a run, train or blackout command needs besides file paths.
/// Physical quantities are SI: rad, m, s; noise densities per √Hz.
struct RunConfig {
  std::uint64_t seed = 0;
  NoiseParams noise;                  // also copied into filter.noise
  std::optional<CameraModel> camera;  // overrides the dataset's camera.json
  VioConfig filter;
  NetArchitecture network;
  TrainConfig training;
  int inference_stride = 1;           // samples between network evaluations
  std::string tracks_file = "tracks.txt";  // relative to the dataset directory
};

/// JSON parsing with strict keys. Unknown keys, wrong types and invalid
/// values throw ConfigError whose message starts with the field path, e.g.
/// "filter.max_clones: expected an integer".
RunConfig parse_run_config(std::string_view json_text, const std::string& source = "config");
RunConfig load_run_config(const std::filesystem::path& path);

TrajectorySpec parse_trajectory_spec(std::string_view json_text, const std::string& source = "spec");
TrajectorySpec load_trajectory_spec(const std::filesystem::path& path);

CameraModel parse_camera(std::string_view json_text, const std::string& source = "camera");
CameraModel load_camera(const std::filesystem::path& path);
std::string camera_to_json(const CameraModel& camera);

/// Default RunConfig rendered as JSON; documents every key.
std::string default_run_config_json();

Primitive parse_primitive(const std::string& name);
BiasProfile parse_bias_profile(const std::string& name);

}  // namespace invio
