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

#include "invio/autodiff.hpp"
#include "invio/liegroup.hpp"

// Tape versions of the SO(3)/SE_2(3) maps. Branch selection (series below
// the small-angle threshold, closed form above) matches the double versions,
// and the series branch is written in θ² so no sqrt is taken near zero.
namespace invio::ad {

struct PoseVar {
  Var rotation;  // 3x3
  Var velocity;  // 3x1
  Var position;  // 3x1
};

PoseVar constant_pose(Tape& tape, const ExtendedPose& pose);
PoseVar compose(const PoseVar& a, const PoseVar& b);
PoseVar inverse(const PoseVar& a);

Var so3_exp(Var phi);
Var gamma1(Var phi);
Var gamma2(Var phi);
Var gamma1_inverse(Var phi);

/// Γ₀, Γ₁, Γ₂ of one rotation vector, sharing the coefficient subgraph.
struct GammaVars {
  Var exp;
  Var gamma1;
  Var gamma2;
};
GammaVars gammas(Var phi);

/// atan2-based log. Throws NumericDomainError (tagged with `step`) within
/// the near-π band, where the gradient is ill conditioned.
Var so3_log(Var rotation, long step = -1);

/// 9x1 (φ, Γ₁⁻¹(φ) v, Γ₁⁻¹(φ) p).
Var se23_log(const PoseVar& pose, long step = -1);

/// One closed-form step with bias-corrected rate/specific force (3x1 each).
PoseVar propagate(const PoseVar& pose, Var omega, Var accel, double dt, const Vec3& gravity);

}  // namespace invio::ad
