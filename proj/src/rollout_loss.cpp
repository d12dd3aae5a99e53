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

#include "invio/rollout_loss.hpp"

#include <cmath>
#include <string>

#include "invio/error.hpp"

namespace invio {

namespace {

double rho(double r, double delta) { return r <= delta ? 0.5 * r * r : delta * (r - 0.5 * delta); }

double huber_value(const Vec9& x, const LossConfig& cfg) {
  if (cfg.huber_mode == ad::HuberMode::kNorm) return rho(x.norm(), cfg.huber_delta);
  double acc = 0.0;
  for (int i = 0; i < 9; ++i) acc += rho(std::abs(x(i)), cfg.huber_delta);
  return acc;
}

Vec9 weighted(const Vec9& xi, const LossWeights& w) {
  Vec9 out;
  out << w.rotation * xi.head<3>(), w.velocity * xi.segment<3>(3), w.position * xi.tail<3>();
  return out;
}

ad::Var weighted(ad::Var xi, const LossWeights& w) {
  return ad::concat({ad::scale(ad::slice(xi, 0, 0, 3, 1), w.rotation), ad::scale(ad::slice(xi, 3, 0, 3, 1), w.velocity),
                     ad::scale(ad::slice(xi, 6, 0, 3, 1), w.position)});
}

void check_config(const LossConfig& cfg) {
  if (!(cfg.huber_delta > 0.0)) throw InvalidArgument("loss: huber delta must be > 0");
  const auto& w = cfg.weights;
  if (!(w.rotation >= 0.0 && w.velocity >= 0.0 && w.position >= 0.0)) {
    throw InvalidArgument("loss: weights must be >= 0");
  }
}

}  // namespace

void validate_segment(const TrainSegment& segment, int window) {
  const auto expected = static_cast<std::size_t>(window) + 1;
  if (segment.samples.size() != expected || segment.states.size() != expected) {
    throw InvalidArgument("segment: expected " + std::to_string(expected) + " samples and states, got " +
                          std::to_string(segment.samples.size()) + " and " + std::to_string(segment.states.size()));
  }
  for (std::size_t k = 0; k < segment.samples.size(); ++k) {
    const auto& s = segment.samples[k];
    if (!std::isfinite(s.t) || !s.omega.allFinite() || !s.accel.allFinite()) {
      throw InvalidArgument("segment: non-finite sample at index " + std::to_string(k));
    }
    if (k > 0 && !(s.t > segment.samples[k - 1].t)) {
      throw InvalidArgument("segment: timestamps must increase (index " + std::to_string(k) + ")");
    }
  }
}

SegmentLoss rollout_loss(const BiasNet& net, const TrainSegment& segment, const LossConfig& config,
                         const NoiseParams& noise) {
  const int window = net.architecture().window;
  validate_segment(segment, window);
  check_config(config);

  SegmentLoss out;
  out.tape = std::make_unique<ad::Tape>();
  ad::Tape& tape = *out.tape;
  tape.reserve(static_cast<std::size_t>(window) * 160 + 256);
  out.params = net.parameter_leaves(tape);
  const auto window_samples = std::span<const ImuSample>(segment.samples).first(static_cast<std::size_t>(window));
  out.bias = net.forward(tape, out.params, net.normalized_input(window_samples));
  const ad::Var gyro_bias = ad::slice(out.bias, 0, 0, 3, 1);
  const ad::Var accel_bias = ad::slice(out.bias, 3, 0, 3, 1);

  ad::PoseVar estimate = ad::constant_pose(tape, segment.states.front());
  ad::Var total;
  for (std::size_t k = 0; k < segment.steps(); ++k) {
    const ImuSample& u = segment.samples[k];
    const double dt = segment.samples[k + 1].t - u.t;
    const ad::Var omega = ad::sub(tape.constant(u.omega), gyro_bias);
    const ad::Var accel = ad::sub(tape.constant(u.accel), accel_bias);
    const ad::PoseVar previous = estimate;
    estimate = ad::propagate(estimate, omega, accel, dt, noise.gravity);

    const long step = static_cast<long>(k + 1);
    ad::Var xi;
    if (config.kind == LossKind::kAbsolute) {
      xi = ad::se23_log(ad::compose(ad::constant_pose(tape, segment.states[k + 1]), ad::inverse(estimate)), step);
    } else {
      const ExtendedPose truth_rel = segment.states[k + 1].inverse() * segment.states[k];
      const ad::PoseVar est_rel = ad::compose(ad::inverse(estimate), previous);
      xi = ad::se23_log(ad::compose(ad::constant_pose(tape, truth_rel), ad::inverse(est_rel)), step);
    }
    const ad::Var term = ad::huber(weighted(xi, config.weights), config.huber_delta, config.huber_mode);
    total = total.valid() ? ad::add(total, term) : term;
  }
  out.loss = total;
  out.value = total.scalar();
  return out;
}

double rollout_loss_value(const BiasNet& net, const TrainSegment& segment, const LossConfig& config,
                          const NoiseParams& noise) {
  const int window = net.architecture().window;
  validate_segment(segment, window);
  check_config(config);
  const auto window_samples = std::span<const ImuSample>(segment.samples).first(static_cast<std::size_t>(window));
  const ImuBias bias = ImuBias::FromStacked(net.forward(net.normalized_input(window_samples)));

  ExtendedPose estimate = segment.states.front();
  double total = 0.0;
  for (std::size_t k = 0; k < segment.steps(); ++k) {
    const double dt = segment.samples[k + 1].t - segment.samples[k].t;
    const ExtendedPose previous = estimate;
    estimate = propagate_state(estimate, segment.samples[k], bias, dt, noise);
    Vec9 xi;
    if (config.kind == LossKind::kAbsolute) {
      xi = right_invariant_error(segment.states[k + 1], estimate);
    } else {
      const ExtendedPose truth_rel = segment.states[k + 1].inverse() * segment.states[k];
      xi = right_invariant_error(truth_rel, estimate.inverse() * previous);
    }
    total += huber_value(weighted(xi, config.weights), config);
  }
  return total;
}

std::vector<TrainSegment> make_segments(std::span<const ImuSample> samples, std::span<const ExtendedPose> states,
                                        int window) {
  if (samples.size() != states.size()) throw InvalidArgument("make_segments: samples and states differ in length");
  if (window < 1) throw InvalidArgument("make_segments: window must be >= 1");
  const auto w = static_cast<std::size_t>(window);
  std::vector<TrainSegment> segments;
  for (std::size_t start = 0; start + w < samples.size(); start += w) {
    TrainSegment seg;
    seg.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(start),
                       samples.begin() + static_cast<std::ptrdiff_t>(start + w + 1));
    seg.states.assign(states.begin() + static_cast<std::ptrdiff_t>(start),
                      states.begin() + static_cast<std::ptrdiff_t>(start + w + 1));
    segments.push_back(std::move(seg));
  }
  return segments;
}

}  // namespace invio
