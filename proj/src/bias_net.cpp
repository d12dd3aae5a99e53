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

#include "invio/bias_net.hpp"

#include <cmath>
#include <random>

#include "invio/error.hpp"
#include "invio/kernels.hpp"

namespace invio {

namespace {

int same_padding(int kernel) { return (kernel - 1) / 2; }

Eigen::MatrixXd he_normal(int rows, int cols, int fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Eigen::MatrixXd conv(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, const Eigen::MatrixXd& b, int stride,
                     int padding) {
  Eigen::MatrixXd out;
  kernels::conv1d_forward(x, w, b, kernels::conv1d_shape(x, w, b, stride, padding), out);
  return out;
}

}  // namespace

void NetArchitecture::validate() const {
  if (window < 1) throw InvalidArgument("net: window must be >= 1");
  if (in_channels != 6) throw InvalidArgument("net: input must have 6 channels (gyro, accel)");
  if (stem_kernel < 1 || stem_kernel % 2 == 0 || kernel < 1 || kernel % 2 == 0) {
    throw InvalidArgument("net: kernel sizes must be odd and positive");
  }
  if (widths.empty()) throw InvalidArgument("net: at least one residual block required");
  for (int w : widths) {
    if (w < 1) throw InvalidArgument("net: block widths must be positive");
  }
}

BiasNet::BiasNet(const NetArchitecture& arch, std::uint64_t seed) : arch_(arch) {
  arch_.validate();
  std::mt19937_64 rng(seed);
  const int k = arch_.kernel;
  const int c0 = arch_.widths.front();

  add_param("stem.weight", he_normal(c0, arch_.in_channels * arch_.stem_kernel, arch_.in_channels * arch_.stem_kernel, rng));
  add_param("stem.bias", Eigen::MatrixXd::Zero(c0, 1));

  int in = c0;
  for (std::size_t i = 0; i < arch_.widths.size(); ++i) {
    const int out = arch_.widths[i];
    const std::string prefix = "block" + std::to_string(i) + ".";
    Block b;
    b.stride = i == 0 ? 1 : 2;
    b.conv1 = add_param(prefix + "conv1.weight", he_normal(out, in * k, in * k, rng));
    add_param(prefix + "conv1.bias", Eigen::MatrixXd::Zero(out, 1));
    b.conv2 = add_param(prefix + "conv2.weight", he_normal(out, out * k, out * k, rng));
    add_param(prefix + "conv2.bias", Eigen::MatrixXd::Zero(out, 1));
    b.has_shortcut = in != out || b.stride != 1;
    if (b.has_shortcut) {
      b.shortcut = add_param(prefix + "shortcut.weight", he_normal(out, in, in, rng));
      add_param(prefix + "shortcut.bias", Eigen::MatrixXd::Zero(out, 1));
    }
    blocks_.push_back(b);
    in = out;
  }
  head_ = add_param("head.weight", Eigen::MatrixXd::Zero(6, in));
  add_param("head.bias", Eigen::MatrixXd::Zero(6, 1));
}

std::size_t BiasNet::add_param(const std::string& name, Eigen::MatrixXd value) {
  params_.push_back(std::move(value));
  names_.push_back(name);
  return params_.size() - 1;
}

std::size_t BiasNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
  return n;
}

Eigen::MatrixXd window_matrix(std::span<const ImuSample> window) {
  Eigen::MatrixXd m(6, static_cast<Eigen::Index>(window.size()));
  for (std::size_t t = 0; t < window.size(); ++t) {
    m.block<3, 1>(0, static_cast<Eigen::Index>(t)) = window[t].omega;
    m.block<3, 1>(3, static_cast<Eigen::Index>(t)) = window[t].accel;
  }
  return m;
}

Eigen::MatrixXd BiasNet::normalized_input(std::span<const ImuSample> window) const {
  if (static_cast<int>(window.size()) != arch_.window) {
    throw InvalidArgument("bias net: window has " + std::to_string(window.size()) + " samples, expected " +
                          std::to_string(arch_.window));
  }
  Eigen::MatrixXd m = window_matrix(window);
  for (int c = 0; c < 6; ++c) {
    m.row(c) = ((m.row(c).array() - normalization.mean(c)) / normalization.stddev(c)).matrix();
  }
  if (!m.allFinite()) throw InvalidArgument("bias net: non-finite input window");
  return m;
}

Vec6 BiasNet::forward(const Eigen::MatrixXd& input) const {
  const auto& p = params_;
  Eigen::MatrixXd h = conv(input, p[0], p[1], 1, same_padding(arch_.stem_kernel)).cwiseMax(0.0);
  const int pad = same_padding(arch_.kernel);
  for (const Block& b : blocks_) {
    Eigen::MatrixXd y = conv(h, p[b.conv1], p[b.conv1 + 1], b.stride, pad).cwiseMax(0.0);
    y = conv(y, p[b.conv2], p[b.conv2 + 1], 1, pad);
    if (b.has_shortcut) {
      y = y + conv(h, p[b.shortcut], p[b.shortcut + 1], b.stride, 0);
    } else {
      y = y + h;
    }
    h = y.cwiseMax(0.0);
  }
  const Eigen::MatrixXd pool = Eigen::MatrixXd::Constant(h.cols(), 1, 1.0 / static_cast<double>(h.cols()));
  const Eigen::MatrixXd pooled = h * pool;
  Eigen::MatrixXd out = p[head_] * pooled;
  out += p[head_ + 1];
  return out;
}

std::vector<ad::Var> BiasNet::parameter_leaves(ad::Tape& tape) const {
  std::vector<ad::Var> leaves;
  leaves.reserve(params_.size());
  for (const auto& p : params_) leaves.push_back(tape.leaf(p));
  return leaves;
}

ad::Var BiasNet::forward(ad::Tape& tape, std::span<const ad::Var> p, const Eigen::MatrixXd& input) const {
  if (p.size() != params_.size()) throw InvalidArgument("bias net: parameter leaf count mismatch");
  const ad::Var x = tape.constant(input);
  ad::Var h = ad::relu(ad::conv1d(x, p[0], p[1], 1, same_padding(arch_.stem_kernel)));
  const int pad = same_padding(arch_.kernel);
  for (const Block& b : blocks_) {
    ad::Var y = ad::relu(ad::conv1d(h, p[b.conv1], p[b.conv1 + 1], b.stride, pad));
    y = ad::conv1d(y, p[b.conv2], p[b.conv2 + 1], 1, pad);
    y = b.has_shortcut ? ad::add(y, ad::conv1d(h, p[b.shortcut], p[b.shortcut + 1], b.stride, 0)) : ad::add(y, h);
    h = ad::relu(y);
  }
  const auto cols = h.value().cols();
  const ad::Var pool = tape.constant(Eigen::MatrixXd::Constant(cols, 1, 1.0 / static_cast<double>(cols)));
  return ad::affine(p[head_], ad::matmul(h, pool), p[head_ + 1]);
}

std::vector<ImuBias> predict_bias(const BiasNet& net, std::span<const ImuSample> window) {
  const Vec6 b = net.forward(net.normalized_input(window));
  return std::vector<ImuBias>(window.size(), ImuBias::FromStacked(b));
}

namespace {

// Sample indices at which a fresh window is evaluated.
std::vector<std::size_t> evaluation_points(std::size_t n, int window, int stride) {
  if (stride < 1) throw InvalidArgument("bias stream: stride must be >= 1");
  std::vector<std::size_t> points;
  for (std::size_t k = static_cast<std::size_t>(window) - 1; k < n; k += static_cast<std::size_t>(stride)) {
    points.push_back(k);
  }
  return points;
}

std::vector<ImuBias> hold(std::size_t n, const std::vector<std::size_t>& points, const std::vector<Vec6>& values) {
  std::vector<ImuBias> out(n);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t end = i + 1 < points.size() ? points[i + 1] : n;
    for (std::size_t k = points[i]; k < end; ++k) out[k] = ImuBias::FromStacked(values[i]);
  }
  return out;
}

}  // namespace

std::vector<ImuBias> predict_bias_stream(const BiasNet& net, std::span<const ImuSample> samples, int stride) {
  const int window = net.architecture().window;
  const auto points = evaluation_points(samples.size(), window, stride);
  // Exceptions cannot leave the parallel loop, so reject bad input up front.
  for (const auto& s : samples) {
    if (!s.omega.allFinite() || !s.accel.allFinite()) throw InvalidArgument("bias stream: non-finite sample");
  }
  std::vector<Vec6> values(points.size());
  const long count = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    const std::size_t k = points[static_cast<std::size_t>(i)];
    values[static_cast<std::size_t>(i)] =
        net.forward(net.normalized_input(samples.subspan(k + 1 - static_cast<std::size_t>(window),
                                                         static_cast<std::size_t>(window))));
  }
  return hold(samples.size(), points, values);
}

namespace reference {

std::vector<ImuBias> predict_bias_stream(const BiasNet& net, std::span<const ImuSample> samples, int stride) {
  const int window = net.architecture().window;
  const auto points = evaluation_points(samples.size(), window, stride);
  std::vector<Vec6> values;
  values.reserve(points.size());
  for (std::size_t k : points) {
    const auto bias = predict_bias(net, samples.subspan(k + 1 - static_cast<std::size_t>(window),
                                                         static_cast<std::size_t>(window)));
    values.push_back(bias.front().stacked());
  }
  return hold(samples.size(), points, values);
}

}  // namespace reference

}  // namespace invio
