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
#include <span>
#include <string>
#include <vector>

#include "invio/autodiff.hpp"
#include "invio/inertial.hpp"

namespace invio {

/// 1-D ResNet layout: stem conv, residual blocks (two convs each, stride 1
/// for the first block and 2 afterwards, 1x1 shortcut when the shape
/// changes), global average pooling and a linear 6-output head.
struct NetArchitecture {
  int window = 200;  // L, samples per input window
  int in_channels = 6;
  int stem_kernel = 7;
  int kernel = 7;
  std::vector<int> widths = {32, 64, 64, 128};

  void validate() const;
  bool operator==(const NetArchitecture&) const = default;
};

using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Per-channel input standardization (ω then a), fitted on training data.
struct InputNormalization {
  Vec6 mean = Vec6::Zero();
  Vec6 stddev = Vec6::Ones();
};

class BiasNet {
 public:
  /// He-normal conv weights, zero biases, zero head (so a fresh net predicts
  /// zero bias).
  explicit BiasNet(const NetArchitecture& arch = {}, std::uint64_t seed = 0);

  const NetArchitecture& architecture() const { return arch_; }

  std::vector<Eigen::MatrixXd>& parameters() { return params_; }
  const std::vector<Eigen::MatrixXd>& parameters() const { return params_; }
  const std::vector<std::string>& parameter_names() const { return names_; }
  std::size_t parameter_count() const;

  InputNormalization normalization;
  int epochs_trained = 0;

  /// Standardized 6xL input built from raw samples.
  Eigen::MatrixXd normalized_input(std::span<const ImuSample> window) const;

  /// Plain forward pass on a standardized 6xL input; returns (b_g, b_a).
  Vec6 forward(const Eigen::MatrixXd& input) const;

  /// Same computation recorded on a tape; `params` are the tape leaves for
  /// parameters(), in order. Returns a 6x1 variable.
  ad::Var forward(ad::Tape& tape, std::span<const ad::Var> params, const Eigen::MatrixXd& input) const;

  std::vector<ad::Var> parameter_leaves(ad::Tape& tape) const;

 private:
  struct Block {
    std::size_t conv1 = 0;  // index of weight; bias follows
    std::size_t conv2 = 0;
    std::size_t shortcut = 0;
    bool has_shortcut = false;
    int stride = 1;
  };

  std::size_t add_param(const std::string& name, Eigen::MatrixXd value);

  NetArchitecture arch_;
  std::vector<Eigen::MatrixXd> params_;
  std::vector<std::string> names_;
  std::vector<Block> blocks_;
  std::size_t head_ = 0;
};

/// Raw 6xL matrix, rows (ωx, ωy, ωz, ax, ay, az).
Eigen::MatrixXd window_matrix(std::span<const ImuSample> window);

/// One forward pass over a window of exactly L samples; the estimate is held
/// constant across the window, so L copies are returned. Throws
/// InvalidArgument for any other window length.
std::vector<ImuBias> predict_bias(const BiasNet& net, std::span<const ImuSample> window);

/// Causal bias estimate for every sample of a stream: the window ending at
/// sample k, evaluated every `stride` samples and held in between. Samples
/// before the first full window get zero bias. Windows run in parallel.
std::vector<ImuBias> predict_bias_stream(const BiasNet& net, std::span<const ImuSample> samples, int stride = 1);

namespace reference {
std::vector<ImuBias> predict_bias_stream(const BiasNet& net, std::span<const ImuSample> samples, int stride = 1);
}

}  // namespace invio
