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

#include <omp.h>

#include <string>

#include "invio/error.hpp"

namespace invio::kernels {

namespace {

// Columns handed to one thread; small enough to balance, large enough for GEMM.
constexpr int kTimeChunk = 32;

void im2col(const Eigen::MatrixXd& input, const Conv1dShape& s, int t_begin, int t_end, Eigen::MatrixXd& cols) {
  cols.resize(s.in_channels * s.kernel, t_end - t_begin);
  for (int t = t_begin; t < t_end; ++t) {
    for (int c = 0; c < s.in_channels; ++c) {
      for (int k = 0; k < s.kernel; ++k) {
        const int src = t * s.stride + k - s.padding;
        cols(c * s.kernel + k, t - t_begin) = (src >= 0 && src < s.length) ? input(c, src) : 0.0;
      }
    }
  }
}

int chunk_count(int t_out) { return (t_out + kTimeChunk - 1) / kTimeChunk; }

}  // namespace

int max_threads() { return omp_get_max_threads(); }

Conv1dShape conv1d_shape(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& bias,
                         int stride, int padding) {
  Conv1dShape s;
  s.in_channels = static_cast<int>(input.rows());
  s.length = static_cast<int>(input.cols());
  s.out_channels = static_cast<int>(weight.rows());
  s.stride = stride;
  s.padding = padding;
  if (s.in_channels == 0 || weight.cols() % s.in_channels != 0) {
    throw InvalidArgument("conv1d: weight columns " + std::to_string(weight.cols()) +
                          " not a multiple of input channels " + std::to_string(s.in_channels));
  }
  s.kernel = static_cast<int>(weight.cols()) / s.in_channels;
  if (bias.rows() != s.out_channels || bias.cols() != 1) throw InvalidArgument("conv1d: bias must be out_channels x 1");
  if (stride < 1 || padding < 0) throw InvalidArgument("conv1d: stride must be >= 1 and padding >= 0");
  if (s.kernel < 1 || s.length + 2 * padding < s.kernel) throw InvalidArgument("conv1d: input shorter than kernel");
  return s;
}

void conv1d_forward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& bias,
                    const Conv1dShape& s, Eigen::MatrixXd& out) {
  const int t_out = s.out_length();
  out.resize(s.out_channels, t_out);
  const int chunks = chunk_count(t_out);
#pragma omp parallel for schedule(static) if (chunks > 1 && !omp_in_parallel())
  for (int chunk = 0; chunk < chunks; ++chunk) {
    const int t0 = chunk * kTimeChunk;
    const int t1 = std::min(t_out, t0 + kTimeChunk);
    Eigen::MatrixXd cols;
    im2col(input, s, t0, t1, cols);
    auto block = out.middleCols(t0, t1 - t0);
    block.noalias() = weight * cols;
    block.colwise() += bias.col(0);
  }
}

void conv1d_backward(const Eigen::MatrixXd& input, const Eigen::MatrixXd& weight, const Eigen::MatrixXd& grad_out,
                     const Conv1dShape& s, Eigen::MatrixXd* grad_input, Eigen::MatrixXd* grad_weight,
                     Eigen::MatrixXd* grad_bias) {
  const int t_out = s.out_length();
  if (grad_bias) *grad_bias = grad_out.rowwise().sum();
  if (!grad_input && !grad_weight) return;

  Eigen::MatrixXd cols;
  im2col(input, s, 0, t_out, cols);
  if (grad_weight) {
    grad_weight->resize(s.out_channels, s.in_channels * s.kernel);
    const int rows = s.out_channels;
#pragma omp parallel for schedule(static) if (rows > 8 && !omp_in_parallel())
    for (int o = 0; o < rows; ++o) {
      grad_weight->row(o).noalias() = grad_out.row(o) * cols.transpose();
    }
  }
  if (grad_input) {
    const Eigen::MatrixXd grad_cols = weight.transpose() * grad_out;
    grad_input->setZero(s.in_channels, s.length);
    // Each input channel scatters into its own row: no write conflicts.
#pragma omp parallel for schedule(static) if (s.in_channels > 1 && !omp_in_parallel())
    for (int c = 0; c < s.in_channels; ++c) {
      for (int t = 0; t < t_out; ++t) {
        for (int k = 0; k < s.kernel; ++k) {
          const int src = t * s.stride + k - s.padding;
          if (src < 0 || src >= s.length) continue;
          (*grad_input)(c, src) += grad_cols(c * s.kernel + k, t);
        }
      }
    }
  }
}

}  // namespace invio::kernels
