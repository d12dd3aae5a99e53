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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "invio/checkpoint.hpp"
#include "invio/error.hpp"
#include "json.hpp"

namespace invio::cli {

namespace {

RunConfig config_or_default(const fs::path& path) { return path.empty() ? RunConfig{} : load_run_config(path); }

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_true_bias(const fs::path& path, const Dataset& data) {
  std::ofstream out = open_out(path);
  out << "#timestamp [ns],b_w_x [rad s^-1],b_w_y [rad s^-1],b_w_z [rad s^-1],"
         "b_a_x [m s^-2],b_a_y [m s^-2],b_a_z [m s^-2]\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < data.true_bias.size() && k < data.imu.size(); ++k) {
    const auto& b = data.true_bias[k];
    out << data.to_ns(data.imu[k].t);
    for (int i = 0; i < 3; ++i) out << ',' << b.gyro(i);
    for (int i = 0; i < 3; ++i) out << ',' << b.accel(i);
    out << '\n';
  }
}

void check_bias_source(const fs::path& checkpoint, bool zero_bias) {
  if (zero_bias == !checkpoint.empty()) {
    throw ConfigError("exactly one of --checkpoint and --zero-bias is required");
  }
}

std::unique_ptr<BiasProvider> make_bias_provider(const fs::path& checkpoint, bool zero_bias, const Dataset& data,
                                                 const RunConfig& config) {
  check_bias_source(checkpoint, zero_bias);
  if (zero_bias) return std::make_unique<ConstantBiasProvider>();
  const BiasNet net = load_checkpoint(checkpoint);
  return std::make_unique<SequenceBiasProvider>(predict_bias_stream(net, data.imu, config.inference_stride));
}

std::vector<TrainSegment> load_segments(const std::vector<fs::path>& dirs, int window, std::ostream& log) {
  std::vector<TrainSegment> out;
  for (const auto& dir : dirs) {
    const Dataset data = load_euroc(dir);
    auto segs = dataset_segments(data, window);
    log << "  " << dir.string() << ": " << segs.size() << " segments\n";
    out.insert(out.end(), std::make_move_iterator(segs.begin()), std::make_move_iterator(segs.end()));
  }
  return out;
}

}  // namespace

int exit_code(const Error& error) {
  switch (error.kind()) {
    case Error::Kind::kConfig:
    case Error::Kind::kInvalidArgument:
      return kExitConfig;
    case Error::Kind::kParse:
    case Error::Kind::kData:
    case Error::Kind::kInsufficientData:
    case Error::Kind::kIo:
      return kExitData;
    case Error::Kind::kNumericDomain:
    case Error::Kind::kNumeric:
    case Error::Kind::kStateCorruption:
    case Error::Kind::kDegenerateGeometry:
    case Error::Kind::kConvergence:
    case Error::Kind::kCheirality:
      return kExitNumeric;
    case Error::Kind::kTrainingDiverged:
      return kExitDiverged;
  }
  return kExitOther;
}

std::vector<TrainSegment> dataset_segments(const Dataset& data, int window) {
  if (data.ground_truth.empty()) throw DataError("training data needs ground truth");
  const double t0 = data.ground_truth.front().t;
  const double t1 = data.ground_truth.back().t;
  std::vector<ImuSample> samples;
  std::vector<double> times;
  for (const auto& s : data.imu) {
    if (s.t < t0 || s.t > t1) continue;
    samples.push_back(s);
    times.push_back(s.t);
  }
  const auto states = interpolate_ground_truth(data.ground_truth, times);
  return make_segments(samples, states, window);
}

Dataset load_run_dataset(const fs::path& dir, const RunConfig& config, const fs::path& tracks_override) {
  Dataset data = load_euroc(dir);
  if (config.camera) {
    data.camera = config.camera;
  } else if (fs::exists(dir / "camera.json")) {
    data.camera = load_camera(dir / "camera.json");
  } else {
    throw ConfigError("no camera model: add a 'camera' section to the config or provide " +
                      (dir / "camera.json").string());
  }
  const fs::path tracks = tracks_override.empty() ? dir / config.tracks_file : tracks_override;
  if (!fs::exists(tracks)) throw IoError("tracks file not found: " + tracks.string());
  data.frames = frames_from_tracks(load_tracks(tracks), data.time_origin_ns);
  return data;
}

Trajectory absolute_trajectory(const Trajectory& relative, std::int64_t time_origin_ns) {
  Trajectory out = relative;
  for (auto& p : out) p.t += static_cast<double>(time_origin_ns) * 1e-9;
  return out;
}

SyntheticData cmd_simulate(const SimulateOptions& options) {
  TrajectorySpec spec = options.spec.empty() ? TrajectorySpec{} : load_trajectory_spec(options.spec);
  if (options.seed) spec.seed = *options.seed;
  SyntheticData sim = synthesize(spec);
  const Dataset& data = sim.dataset;
  fs::create_directories(options.out);
  write_euroc(data, options.out);
  write_tracks(options.out / "tracks.txt", data.frames, data.time_origin_ns);
  open_out(options.out / "camera.json") << camera_to_json(*data.camera);
  write_true_bias(options.out / "true_bias.csv", data);
  write_trajectory(options.out / "groundtruth.tum", ground_truth_trajectory(data), data.time_origin_ns);
  nlohmann::ordered_json prov;
  prov["command"] = "simulate";
  prov["seed"] = spec.seed;
  prov["spec"] = options.spec.empty() ? "default" : options.spec.string();
  prov["imu_samples"] = data.imu.size();
  prov["frames"] = data.frames.size();
  prov["landmarks"] = sim.landmarks.size();
  open_out(options.out / "provenance.json") << prov.dump(2) << '\n';
  return sim;
}

TrainResult cmd_train(const TrainOptions& options, std::ostream& log) {
  if (options.train_dirs.empty()) throw ConfigError("train: at least one --train directory is required");
  if (options.checkpoint_out.empty()) throw ConfigError("train: --out checkpoint path is required");
  RunConfig config = config_or_default(options.config);
  if (options.epochs) config.training.epochs = *options.epochs;
  if (config.training.epochs < 0) throw ConfigError("training.epochs: must be >= 0");

  BiasNet initial = options.resume.empty() ? BiasNet(config.network, config.seed) : load_checkpoint(options.resume);
  if (!options.resume.empty()) {
    config.training.fit_normalization = false;
    log << "resuming from " << options.resume.string() << " at epoch " << initial.epochs_trained << '\n';
  }
  const int window = initial.architecture().window;
  log << "training split\n";
  const auto train_split = load_segments(options.train_dirs, window, log);
  log << "validation split\n";
  const auto val_split = load_segments(options.validation_dirs, window, log);
  if (train_split.empty()) throw InsufficientData("train: no complete training segments");

  const fs::path trace_path =
      options.loss_trace.empty() ? fs::path(options.checkpoint_out.string() + ".loss.csv") : options.loss_trace;
  const bool append = !options.resume.empty() && fs::exists(trace_path);
  if (trace_path.has_parent_path()) fs::create_directories(trace_path.parent_path());
  std::ofstream trace(trace_path, append ? std::ios::app : std::ios::trunc);
  if (!trace) throw IoError("cannot open " + trace_path.string() + " for writing");
  if (!append) trace << "epoch,train_loss,validation_loss\n";
  trace << std::setprecision(17);

  TrainResult result = train(initial, train_split, val_split, config.training, config.noise, [&](const EpochRecord& r) {
    trace << r.epoch << ',' << r.train_loss << ',' << r.validation_loss << '\n';
    trace.flush();
    log << "epoch " << r.epoch << " train " << r.train_loss << " validation " << r.validation_loss << '\n';
  });
  save_checkpoint(result.net, options.checkpoint_out);
  log << "best epoch " << result.best_epoch << " validation " << result.best_validation_loss << "; wrote "
      << options.checkpoint_out.string() << '\n';
  return result;
}

VioResult cmd_run(const RunOptions& options, std::ostream& log) {
  if (options.out.empty()) throw ConfigError("run: --out directory is required");
  check_bias_source(options.checkpoint, options.zero_bias);
  const RunConfig config = config_or_default(options.config);
  const Dataset data = load_run_dataset(options.dataset, config, options.tracks);
  const auto bias = make_bias_provider(options.checkpoint, options.zero_bias, data, config);

  VioResult result = run_vio(data.imu, data.frames, *data.camera, initial_pose(data), *bias, config.filter);

  fs::create_directories(options.out);
  const Trajectory est = to_trajectory(result.trajectory);
  write_trajectory(options.out / "trajectory.tum", est, data.time_origin_ns);
  {
    std::ofstream diag = open_out(options.out / "diagnostics.jsonl");
    for (const auto& d : result.diagnostics) diag << to_json_line(d) << '\n';
  }
  nlohmann::ordered_json summary;
  summary["command"] = "run";
  summary["seed"] = config.seed;
  summary["bias"] = options.zero_bias ? "zero" : options.checkpoint.string();
  summary["imu_samples"] = data.imu.size();
  summary["frames"] = data.frames.size();
  summary["updates"] = result.updates;
  summary["features_used"] = result.features_used;
  summary["features_rejected"] = result.features_rejected;
  if (!data.ground_truth.empty()) {
    const MetricReport report = evaluate(est, ground_truth_trajectory(data));
    open_out(options.out / "metrics.json") << to_json(report) << '\n';
    summary["ate_translation_m"] = report.ate.translation_rmse;
    log << to_text(report);
  }
  open_out(options.out / "run.json") << summary.dump(2) << '\n';
  log << "updates " << result.updates << ", features used " << result.features_used << ", rejected "
      << result.features_rejected << "; wrote " << (options.out / "trajectory.tum").string() << '\n';
  return result;
}

MetricReport cmd_eval(const EvalOptions& options, std::ostream& out) {
  const Trajectory est = read_trajectory(options.estimate);
  Trajectory gt;
  if (fs::is_directory(options.ground_truth)) {
    const Dataset data = load_euroc(options.ground_truth);
    gt = absolute_trajectory(ground_truth_trajectory(data), data.time_origin_ns);
  } else {
    gt = read_trajectory(options.ground_truth);
  }
  const MetricReport report = evaluate(est, gt, options.alignment, options.relative);
  out << "alignment: " << to_string(options.alignment) << '\n' << to_text(report);
  if (!options.json_out.empty()) open_out(options.json_out) << to_json(report) << '\n';
  return report;
}

std::vector<BlackoutReport> cmd_blackout(const BlackoutOptions& options, std::ostream& out) {
  if (options.durations.empty()) throw ConfigError("blackout: no durations");
  check_bias_source(options.checkpoint, options.zero_bias);
  const RunConfig config = config_or_default(options.config);
  const Dataset data = load_run_dataset(options.dataset, config, options.tracks);
  const auto bias = make_bias_provider(options.checkpoint, options.zero_bias, data, config);

  const double t0 = data.imu.front().t;
  const double t1 = data.imu.back().t;
  const double longest = *std::max_element(options.durations.begin(), options.durations.end());
  const double start = t0 + options.start.value_or(0.5 * (t1 - t0 - longest));

  if (!options.out.empty()) fs::create_directories(options.out);
  std::vector<BlackoutReport> reports;
  std::ofstream table;
  if (!options.out.empty()) {
    table = open_out(options.out / "blackout.csv");
    table << "duration_s,start_s,nominal_ate_m,blackout_ate_m,nominal_rot_deg,blackout_rot_deg,updates_in_window\n";
    table << std::setprecision(17);
  }
  out << "duration_s nominal_ate_m blackout_ate_m updates_in_window\n";
  for (double d : options.durations) {
    BlackoutReport r = blackout_harness(data, *bias, config.filter, start, d, options.alignment);
    out << d << ' ' << r.nominal.ate.translation_rmse << ' ' << r.blackout.ate.translation_rmse << ' '
        << r.updates_in_window << '\n';
    if (!options.out.empty()) {
      table << d << ',' << start << ',' << r.nominal.ate.translation_rmse << ',' << r.blackout.ate.translation_rmse
            << ',' << r.nominal.ate.rotation_rmse_deg << ',' << r.blackout.ate.rotation_rmse_deg << ','
            << r.updates_in_window << '\n';
      std::ostringstream name;
      name << "blackout_" << d << "s.tum";
      write_trajectory(options.out / name.str(), r.blackout_trajectory, data.time_origin_ns);
    }
    reports.push_back(std::move(r));
  }
  if (!options.out.empty() && !reports.empty()) {
    write_trajectory(options.out / "nominal.tum", reports.front().nominal_trajectory, data.time_origin_ns);
  }
  return reports;
}

}  // namespace invio::cli
