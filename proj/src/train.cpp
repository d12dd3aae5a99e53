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

#include "invio/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "invio/error.hpp"
#include "parallel.hpp"

namespace invio {

namespace {

constexpr double kMinInputStddev = 1e-2;

std::vector<Eigen::MatrixXd> zeros_like(const std::vector<Eigen::MatrixXd>& params) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
  return out;
}

struct SegmentGradient {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> grads;
};

SegmentGradient segment_gradient(const BiasNet& net, const TrainSegment& segment, const LossConfig& config,
                                 const NoiseParams& noise) {
  SegmentLoss sl = rollout_loss(net, segment, config, noise);
  const ad::Gradients g = sl.tape->backward(sl.loss);
  SegmentGradient out;
  out.loss = sl.value;
  out.grads.reserve(sl.params.size());
  for (const ad::Var p : sl.params) out.grads.push_back(g.of(p));
  return out;
}

BatchGradient reduce(const BiasNet& net, std::vector<SegmentGradient>& parts) {
  BatchGradient out;
  out.grads = zeros_like(net.parameters());
  const double inv = 1.0 / static_cast<double>(parts.size());
  for (const auto& part : parts) {
    out.loss += part.loss;
    for (std::size_t i = 0; i < out.grads.size(); ++i) out.grads[i] += part.grads[i];
  }
  out.loss *= inv;
  for (auto& g : out.grads) g *= inv;
  return out;
}

void check_indices(std::span<const TrainSegment> segments, std::span<const std::size_t> indices) {
  if (indices.empty()) throw InvalidArgument("batch: no segments");
  for (std::size_t i : indices) {
    if (i >= segments.size()) throw InvalidArgument("batch: segment index out of range");
  }
}

bool all_finite(const BatchGradient& bg) {
  if (!std::isfinite(bg.loss)) return false;
  return std::all_of(bg.grads.begin(), bg.grads.end(), [](const auto& g) { return g.allFinite(); });
}

}  // namespace

void adam_step(std::vector<Eigen::MatrixXd>& params, const std::vector<Eigen::MatrixXd>& grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) throw InvalidArgument("adam: parameter/gradient count mismatch");
  if (state.m.empty()) {
    state.m = zeros_like(params);
    state.v = zeros_like(params);
  }
  if (state.m.size() != params.size()) throw InvalidArgument("adam: state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols()) {
      throw InvalidArgument("adam: gradient shape mismatch for parameter " + std::to_string(i));
    }
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i].cwiseAbs2();
    const auto m_hat = state.m[i].array() / c1;
    const auto v_hat = state.v[i].array() / c2;
    params[i].array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
  }
}

BatchGradient batch_gradient(const BiasNet& net, std::span<const TrainSegment> segments,
                             std::span<const std::size_t> indices, const LossConfig& config,
                             const NoiseParams& noise) {
  check_indices(segments, indices);
  std::vector<SegmentGradient> parts(indices.size());
  detail::parallel_for(static_cast<long>(indices.size()), [&](long i) {
    const auto j = static_cast<std::size_t>(i);
    parts[j] = segment_gradient(net, segments[indices[j]], config, noise);
  });
  return reduce(net, parts);
}

namespace reference {

BatchGradient batch_gradient(const BiasNet& net, std::span<const TrainSegment> segments,
                             std::span<const std::size_t> indices, const LossConfig& config,
                             const NoiseParams& noise) {
  check_indices(segments, indices);
  std::vector<SegmentGradient> parts;
  parts.reserve(indices.size());
  for (std::size_t i : indices) parts.push_back(segment_gradient(net, segments[i], config, noise));
  return reduce(net, parts);
}

}  // namespace reference

double mean_loss(const BiasNet& net, std::span<const TrainSegment> segments, const LossConfig& config,
                 const NoiseParams& noise) {
  if (segments.empty()) throw InvalidArgument("mean_loss: no segments");
  std::vector<double> values(segments.size());
  detail::parallel_for(static_cast<long>(segments.size()), [&](long i) {
    values[static_cast<std::size_t>(i)] = rollout_loss_value(net, segments[static_cast<std::size_t>(i)], config, noise);
  });
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

InputNormalization fit_normalization(std::span<const TrainSegment> segments, int window) {
  if (segments.empty()) throw InvalidArgument("fit_normalization: no segments");
  Vec6 sum = Vec6::Zero();
  Vec6 sum_sq = Vec6::Zero();
  double count = 0.0;
  for (const auto& seg : segments) {
    const std::size_t n = std::min(seg.samples.size(), static_cast<std::size_t>(window));
    for (std::size_t k = 0; k < n; ++k) {
      Vec6 x;
      x << seg.samples[k].omega, seg.samples[k].accel;
      sum += x;
      sum_sq += x.cwiseAbs2();
      count += 1.0;
    }
  }
  InputNormalization norm;
  norm.mean = sum / count;
  const Vec6 var = (sum_sq / count - norm.mean.cwiseAbs2()).cwiseMax(0.0);
  norm.stddev = var.cwiseSqrt().cwiseMax(kMinInputStddev);
  return norm;
}

TrainResult train(const BiasNet& initial, std::span<const TrainSegment> train_split,
                  std::span<const TrainSegment> validation_split, const TrainConfig& config, const NoiseParams& noise,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  if (config.epochs < 0) throw InvalidArgument("train: epochs must be >= 0");
  if (config.batch_size < 1) throw InvalidArgument("train: batch size must be >= 1");
  if (!(config.adam.learning_rate > 0.0)) throw InvalidArgument("train: learning rate must be > 0");
  const int window = initial.architecture().window;
  for (const auto& seg : train_split) validate_segment(seg, window);
  for (const auto& seg : validation_split) validate_segment(seg, window);

  TrainResult result{initial, {}, initial.epochs_trained, std::numeric_limits<double>::infinity()};
  if (config.epochs == 0) return result;
  if (train_split.empty()) throw InsufficientData("train: empty training split");

  BiasNet net = initial;
  if (config.fit_normalization) net.normalization = fit_normalization(train_split, window);

  AdamState adam;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_split.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int e = 0; e < config.epochs; ++e) {
    const int epoch = net.epochs_trained + 1;
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const auto indices = std::span<const std::size_t>(order).subspan(start, std::min(batch, order.size() - start));
      BatchGradient bg;
      try {
        bg = batch_gradient(net, train_split, indices, config.loss, noise);
      } catch (const NumericDomainError& err) {
        throw TrainingDiverged(epoch, err.what());
      }
      if (!all_finite(bg)) throw TrainingDiverged(epoch, "non-finite loss or gradient");
      adam_step(net.parameters(), bg.grads, adam, config.adam);
      loss_sum += bg.loss;
      ++batches;
    }
    net.epochs_trained = epoch;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    try {
      rec.validation_loss =
          validation_split.empty() ? rec.train_loss : mean_loss(net, validation_split, config.loss, noise);
    } catch (const NumericDomainError& err) {
      throw TrainingDiverged(epoch, err.what());
    }
    if (!std::isfinite(rec.validation_loss)) throw TrainingDiverged(epoch, "non-finite validation loss");
    result.trace.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.validation_loss < result.best_validation_loss) {
      result.best_validation_loss = rec.validation_loss;
      result.best_epoch = epoch;
      result.net = net;
    }
  }
  return result;
}

}  // namespace invio
