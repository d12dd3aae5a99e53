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
#include <functional>
#include <span>
#include <vector>

#include "invio/rollout_loss.hpp"

namespace invio {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long step = 0;
};

/// One bias-corrected Adam update in place. Moments are created on first use.
void adam_step(std::vector<Eigen::MatrixXd>& params, const std::vector<Eigen::MatrixXd>& grads, AdamState& state,
               const AdamConfig& config);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 8;
  std::uint64_t seed = 0;
  AdamConfig adam;
  LossConfig loss;
  /// Refit the input standardization on the training split before the first
  /// epoch. Turn off when resuming from a checkpoint.
  bool fit_normalization = true;
};

struct EpochRecord {
  int epoch = 0;  // cumulative, counting epochs already in the initial net
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainResult {
  BiasNet net;  // parameters with the lowest validation loss
  std::vector<EpochRecord> trace;
  int best_epoch = 0;
  double best_validation_loss = 0.0;
};

/// Mean segment loss over a batch and its gradient with respect to every
/// parameter. Segments are evaluated in parallel; the reduction runs in
/// index order, so results do not depend on the thread count.
struct BatchGradient {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> grads;
};

BatchGradient batch_gradient(const BiasNet& net, std::span<const TrainSegment> segments,
                             std::span<const std::size_t> indices, const LossConfig& config, const NoiseParams& noise);

namespace reference {
BatchGradient batch_gradient(const BiasNet& net, std::span<const TrainSegment> segments,
                             std::span<const std::size_t> indices, const LossConfig& config, const NoiseParams& noise);
}

/// Mean loss over all segments without gradients.
double mean_loss(const BiasNet& net, std::span<const TrainSegment> segments, const LossConfig& config,
                 const NoiseParams& noise);

InputNormalization fit_normalization(std::span<const TrainSegment> segments, int window);

/// Adam over shuffled mini-batches of the training split. Returns the
/// parameters with the best validation loss (training loss when the
/// validation split is empty). Zero epochs returns `initial` unchanged.
/// Throws TrainingDiverged when a loss or gradient turns non-finite.
TrainResult train(const BiasNet& initial, std::span<const TrainSegment> train_split,
                  std::span<const TrainSegment> validation_split, const TrainConfig& config, const NoiseParams& noise,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace invio
