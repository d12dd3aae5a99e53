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

#include <Eigen/Core>

namespace invio::kernels {

/// Geometry of a 1-D convolution over a (channels x time) signal. Weights are
/// laid out as an (out_channels x in_channels*kernel) matrix with column index
/// `c * kernel + k`.
struct Conv1dShape {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int length = 0;

  int out_length() const { return (length + 2 * padding - kernel) / stride + 1; }
};

/// Derives the shape from tensor sizes; throws InvalidArgument on mismatch.
Conv1dShape conv1d_shape(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& bias,
                         int stride, int padding);

// OpenMP-parallel kernels (im2col + blocked GEMM, parallel over time chunks
// or channels). Inside an enclosing parallel region they run on one thread.
void conv1d_forward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& bias,
                    const Conv1dShape& shape, Eigen::MatrixXd& out);

/// Any of the gradient outputs may be null. Gradients are overwritten.
void conv1d_backward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& grad_out,
                     const Conv1dShape& shape, Eigen::MatrixXd* grad_input, Eigen::MatrixXd* grad_weight,
                     Eigen::MatrixXd* grad_bias);

namespace reference {

// Direct loops, single threaded. Kept as the oracle for the kernels above.
void conv1d_forward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& bias,
                    const Conv1dShape& shape, Eigen::MatrixXd& out);
void conv1d_backward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& grad_out,
                     const Conv1dShape& shape, Eigen::MatrixXd* grad_input, Eigen::MatrixXd* grad_weight,
                     Eigen::MatrixXd* grad_bias);

}  // namespace reference

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();

}  // namespace invio::kernels
