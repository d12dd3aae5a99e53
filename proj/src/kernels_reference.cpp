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

#include "invio/kernels.hpp"

namespace invio::kernels::reference {

void conv1d_forward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& bias,
                    const Conv1dShape& s, Eigen::MatrixXd& out) {
  const int t_out = s.out_length();
  out.resize(s.out_channels, t_out);
  for (int o = 0; o < s.out_channels; ++o) {
    for (int t = 0; t < t_out; ++t) {
      double acc = bias(o, 0);
      for (int c = 0; c < s.in_channels; ++c) {
        for (int k = 0; k < s.kernel; ++k) {
          const int src = t * s.stride + k - s.padding;
          if (src < 0 || src >= s.length) continue;
          acc += weight(o, c * s.kernel + k) * input(c, src);
        }
      }
      out(o, t) = acc;
    }
  }
}

void conv1d_backward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& grad_out,
                     const Conv1dShape& s, Eigen::MatrixXd* grad_input, Eigen::MatrixXd* grad_weight,
                     Eigen::MatrixXd* grad_bias) {
  const int t_out = s.out_length();
  if (grad_input) grad_input->setZero(s.in_channels, s.length);
  if (grad_weight) grad_weight->setZero(s.out_channels, s.in_channels * s.kernel);
  if (grad_bias) grad_bias->setZero(s.out_channels, 1);
  for (int o = 0; o < s.out_channels; ++o) {
    for (int t = 0; t < t_out; ++t) {
      const double g = grad_out(o, t);
      if (grad_bias) (*grad_bias)(o, 0) += g;
      for (int c = 0; c < s.in_channels; ++c) {
        for (int k = 0; k < s.kernel; ++k) {
          const int src = t * s.stride + k - s.padding;
          if (src < 0 || src >= s.length) continue;
          if (grad_weight) (*grad_weight)(o, c * s.kernel + k) += g * input(c, src);
          if (grad_input) (*grad_input)(c, src) += g * weight(o, c * s.kernel + k);
        }
      }
    }
  }
}

}  // namespace invio::kernels::reference
