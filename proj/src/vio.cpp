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

#include "invio/vio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "invio/error.hpp"
#include "json.hpp"

namespace invio {

ImuBias SequenceBiasProvider::bias(std::size_t k) const {
  if (k >= biases_.size()) throw InvalidArgument("bias provider: no bias for sample " + std::to_string(k));
  return biases_[k];
}

void VioConfig::validate() const {
  noise.validate();
  if (max_clones < 2) throw InvalidArgument("vio: max_clones must be >= 2");
  if (min_track_length < 2) throw InvalidArgument("vio: min_track_length must be >= 2");
  if (!(gate_probability > 0.0 && gate_probability < 1.0)) throw InvalidArgument("vio: gate probability in (0,1)");
  if (!(max_reprojection_rms_px > 0.0)) throw InvalidArgument("vio: max_reprojection_rms_px must be > 0");
  if (!(max_imu_gap > 0.0) || !(max_frame_gap > 0.0)) throw InvalidArgument("vio: gap thresholds must be > 0");
  for (const auto& w : suppress) {
    if (!(w.end > w.start)) throw InvalidArgument("vio: blackout window must have end > start");
  }
}

std::string to_json_line(const DiagnosticRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  j["event"] = r.event;
  j["innovation_norm"] = r.innovation_norm;
  j["gate"] = {{"accepted", r.accepted}, {"rejected", r.rejected}};
  j["clones"] = r.clones;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump();
}

namespace {

using Track = std::vector<std::pair<long, Vec2>>;  // (frame, pixel)

class Runner {
 public:
  Runner(const CameraModel& camera, const VioConfig& config, VioResult& result)
      : camera_(camera), config_(config), result_(result) {}

  FilterState state;

  void frame(const FrameObservations& obs, long frame_id) {
    const bool blacked_out =
        std::any_of(config_.suppress.begin(), config_.suppress.end(), [&](const auto& w) { return w.contains(obs.t); });
    if (blacked_out) {
      if (!in_blackout_) {
        tracks_.clear();
        log(obs.t, "blackout_start");
      }
      in_blackout_ = true;
      return;
    }
    if (in_blackout_) log(obs.t, "blackout_end");
    in_blackout_ = false;
    if (have_last_frame_ && obs.t - last_frame_t_ > config_.max_frame_gap) {
      log(obs.t, "visual_gap", "no frame for " + std::to_string(obs.t - last_frame_t_) + " s");
    }
    have_last_frame_ = true;
    last_frame_t_ = obs.t;

    std::vector<Track> batch;
    if (state.clones.size() >= config_.max_clones) {
      const long oldest = state.clones.front().frame;
      for (auto it = tracks_.begin(); it != tracks_.end();) {
        if (it->second.front().first == oldest) {
          batch.push_back(std::move(it->second));
          it = tracks_.erase(it);
        } else {
          ++it;
        }
      }
      if (!batch.empty()) update(obs.t, batch);
      batch.clear();
    }

    augment_clone(state, frame_id, config_.max_clones);
    // Observations in marginalized clones can no longer be linearized.
    prune(state.clones.front().frame);

    std::set<long> seen;
    for (const auto& [id, px] : obs.features) {
      if (!seen.insert(id).second) continue;
      tracks_[id].emplace_back(frame_id, px);
    }
    for (auto it = tracks_.begin(); it != tracks_.end();) {
      if (!seen.count(it->first)) {
        batch.push_back(std::move(it->second));
        it = tracks_.erase(it);
      } else {
        ++it;
      }
    }
    if (!batch.empty()) update(obs.t, batch);
  }

  void log(double t, std::string event, std::string detail = {}) {
    DiagnosticRecord r;
    r.t = t;
    r.event = std::move(event);
    r.clones = state.clones.size();
    r.detail = std::move(detail);
    result_.diagnostics.push_back(std::move(r));
  }

 private:
  void prune(long oldest_frame) {
    for (auto it = tracks_.begin(); it != tracks_.end();) {
      auto& obs = it->second;
      obs.erase(std::remove_if(obs.begin(), obs.end(), [&](const auto& o) { return o.first < oldest_frame; }),
                obs.end());
      it = obs.empty() ? tracks_.erase(it) : std::next(it);
    }
  }

  void update(double t, const std::vector<Track>& batch) {
    std::map<long, std::size_t> clone_index;
    for (std::size_t i = 0; i < state.clones.size(); ++i) clone_index[state.clones[i].frame] = i;

    std::vector<ProjectedMeasurement> parts;
    Eigen::Index rows = 0;
    int accepted = 0;
    int rejected = 0;
    for (const Track& track : batch) {
      if (track.size() < config_.min_track_length) continue;
      FeatureTrack ft;
      for (const auto& [frame, px] : track) {
        const auto it = clone_index.find(frame);
        if (it != clone_index.end()) ft.observations.push_back({it->second, px});
      }
      if (ft.observations.size() < config_.min_track_length) continue;
      try {
        const TriangulationResult tri = triangulate(ft, state.clones, camera_, config_.triangulation);
        if (tri.rms_residual_px > config_.max_reprojection_rms_px) {
          ++rejected;
          continue;
        }
        ProjectedMeasurement m = nullspace_project(feature_jacobian(ft, state, tri.landmark, camera_));
        if (config_.chi2_gating) {
          const double chi2 = mahalanobis(state, m, camera_.pixel_sigma);
          if (chi2 > chi2_quantile(config_.gate_probability, static_cast<double>(m.residual.size()))) {
            ++rejected;
            continue;
          }
        }
        rows += m.h.rows();
        parts.push_back(std::move(m));
        ++accepted;
      } catch (const DegenerateGeometry&) {
        ++rejected;
      } catch (const ConvergenceError&) {
        ++rejected;
      } catch (const CheiralityError&) {
        ++rejected;
      }
    }
    result_.features_used += static_cast<std::size_t>(accepted);
    result_.features_rejected += static_cast<std::size_t>(rejected);
    if (parts.empty()) return;

    Eigen::MatrixXd h(rows, state.dim());
    Eigen::VectorXd r(rows);
    Eigen::Index row = 0;
    for (const auto& m : parts) {
      h.middleRows(row, m.h.rows()) = m.h;
      r.segment(row, m.residual.size()) = m.residual;
      row += m.h.rows();
    }
    const UpdateOutcome out = ekf_update(state, h, r, camera_.pixel_sigma);
    ++result_.updates;
    DiagnosticRecord rec;
    rec.t = t;
    rec.event = "update";
    rec.innovation_norm = out.innovation_norm;
    rec.accepted = accepted;
    rec.rejected = rejected;
    rec.clones = state.clones.size();
    result_.diagnostics.push_back(std::move(rec));
  }

  const CameraModel& camera_;
  const VioConfig& config_;
  VioResult& result_;
  std::map<long, Track> tracks_;
  bool in_blackout_ = false;
  bool have_last_frame_ = false;
  double last_frame_t_ = 0.0;
};

}  // namespace

VioResult run_vio(std::span<const ImuSample> imu, std::span<const FrameObservations> frames,
                  const CameraModel& camera, const ExtendedPose& initial_pose, const BiasProvider& bias,
                  const VioConfig& config) {
  config.validate();
  camera.validate();
  if (imu.size() < 2) throw InsufficientData("run_vio: need at least two IMU samples");
  for (std::size_t k = 1; k < imu.size(); ++k) {
    if (!(imu[k].t > imu[k - 1].t)) throw DataError("run_vio: IMU timestamps must increase (sample " + std::to_string(k) + ")");
  }
  for (std::size_t f = 1; f < frames.size(); ++f) {
    if (!(frames[f].t > frames[f - 1].t)) throw DataError("run_vio: frame timestamps must increase");
  }

  VioResult result;
  result.trajectory.reserve(imu.size());
  Runner runner(camera, config, result);
  runner.state = make_filter_state(imu.front().t, initial_pose, config.initial_variances);

  std::size_t next_frame = 0;
  long frame_id = 0;
  for (std::size_t k = 0; k < imu.size(); ++k) {
    const double t = imu[k].t;
    const double half_period = 0.5 * (k + 1 < imu.size() ? imu[k + 1].t - t : t - imu[k - 1].t);
    while (next_frame < frames.size() && frames[next_frame].t < t - half_period) {
      runner.log(frames[next_frame].t, "frame_unmatched");
      ++next_frame;
    }
    if (next_frame < frames.size() && std::abs(frames[next_frame].t - t) <= half_period) {
      runner.frame(frames[next_frame], frame_id++);
      ++next_frame;
    }
    result.trajectory.push_back({t, runner.state.pose});
    if (config.record_covariance) result.covariances.push_back(runner.state.cov.topLeftCorner<9, 9>());
    if (k + 1 < imu.size()) {
      const double dt = imu[k + 1].t - t;
      if (dt > config.max_imu_gap) runner.log(t, "imu_gap", "gap of " + std::to_string(dt) + " s");
      propagate(runner.state, imu[k], bias.bias(k), dt, config.noise);
      runner.state.t = imu[k + 1].t;
    }
  }
  return result;
}

}  // namespace invio
