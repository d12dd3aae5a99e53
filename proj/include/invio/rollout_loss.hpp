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

#include <memory>
#include <span>
#include <vector>

#include "invio/autodiff_lie.hpp"
#include "invio/bias_net.hpp"

namespace invio {

/// Ground-truth slice used for training: N+1 states and the N+1 raw samples
/// at the same instants. Sample k drives the step from t_k to t_{k+1}; the
/// first N samples form the network window, so N equals the net's L.
struct TrainSegment {
  std::vector<ImuSample> samples;
  std::vector<ExtendedPose> states;

  std::size_t steps() const { return samples.empty() ? 0 : samples.size() - 1; }
};

struct LossWeights {
  double rotation = 1e3;
  double velocity = 1e1;
  double position = 1e2;
};

enum class LossKind {
  kAbsolute,  // log(X_k X̂_k⁻¹) against the ground-truth state
  kRelative,  // log(G_k Ĝ_k⁻¹) with G_k = X_k⁻¹ X_{k-1}
};

struct LossConfig {
  LossWeights weights;
  double huber_delta = 1.0;
  ad::HuberMode huber_mode = ad::HuberMode::kNorm;
  LossKind kind = LossKind::kAbsolute;
};

struct SegmentLoss {
  std::unique_ptr<ad::Tape> tape;
  ad::Var loss;
  std::vector<ad::Var> params;  // leaves, same order as BiasNet::parameters()
  ad::Var bias;                 // 6x1 network output
  double value = 0.0;
};

/// Throws InvalidArgument unless the segment has window+1 finite samples and
/// states with strictly increasing timestamps.
void validate_segment(const TrainSegment& segment, int window);

/// Predicts one bias for the segment window, rolls the closed-form
/// kinematics out from X_0 and sums ρ(W ξ_k) over k = 1..N on a tape.
/// Throws NumericDomainError (with the step) if a log lands near π.
SegmentLoss rollout_loss(const BiasNet& net, const TrainSegment& segment, const LossConfig& config,
                         const NoiseParams& noise);

/// The same objective evaluated without recording a tape.
double rollout_loss_value(const BiasNet& net, const TrainSegment& segment, const LossConfig& config,
                          const NoiseParams& noise);

/// Splits an aligned sample/state stream into consecutive segments of
/// window+1 instants that share their end points. A trailing remainder
/// shorter than a full segment is dropped.
std::vector<TrainSegment> make_segments(std::span<const ImuSample> samples, std::span<const ExtendedPose> states,
                                        int window);

}  // namespace invio
