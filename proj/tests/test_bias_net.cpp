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

#include <gtest/gtest.h>
#include <omp.h>

#include <sstream>

#include "invio/bias_net.hpp"
#include "invio/checkpoint.hpp"
#include "invio/error.hpp"
#include "test_util.hpp"

using namespace invio;

namespace {

std::vector<ImuSample> random_samples(std::mt19937_64& rng, int n, double dt = 0.005) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<ImuSample> out(n);
  for (int k = 0; k < n; ++k) {
    out[k].t = k * dt;
    out[k].omega = Vec3(g(rng), g(rng), g(rng)) * 0.3;
    out[k].accel = Vec3(g(rng), g(rng), 9.81 + g(rng));
  }
  return out;
}

BiasNet randomized(const NetArchitecture& arch, std::uint64_t seed) {
  BiasNet net(arch, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> g(0.0, 0.05);
  for (auto& p : net.parameters()) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] += g(rng);
  }
  return net;
}

NetArchitecture small_arch() {
  NetArchitecture a;
  a.window = 40;
  a.widths = {8, 16};
  a.kernel = 5;
  a.stem_kernel = 5;
  return a;
}

}  // namespace

TEST(BiasNet, DefaultParameterCount) {
  const BiasNet net;
  EXPECT_NEAR(static_cast<double>(net.parameter_count()), 3e5, 0.2 * 3e5);
  EXPECT_EQ(net.parameter_names().size(), net.parameters().size());
  EXPECT_EQ(net.parameter_names().front(), "stem.weight");
  EXPECT_EQ(net.parameter_names().back(), "head.bias");
}

TEST(BiasNet, FreshNetPredictsZero) {
  std::mt19937_64 rng(1);
  const BiasNet net(small_arch(), 3);
  const auto window = random_samples(rng, 40);
  for (const auto& b : predict_bias(net, window)) {
    EXPECT_EQ(b.gyro, Vec3::Zero());
    EXPECT_EQ(b.accel, Vec3::Zero());
  }
}

TEST(BiasNet, SeedDeterminesInitialization) {
  const BiasNet a(small_arch(), 7), b(small_arch(), 7), c(small_arch(), 8);
  for (std::size_t i = 0; i < a.parameters().size(); ++i) EXPECT_EQ(a.parameters()[i], b.parameters()[i]);
  EXPECT_NE(a.parameters()[0], c.parameters()[0]);
}

TEST(BiasNet, TapeForwardIsBitIdentical) {
  std::mt19937_64 rng(2);
  const BiasNet net = randomized(small_arch(), 4);
  const Eigen::MatrixXd input = net.normalized_input(random_samples(rng, 40));
  ad::Tape tape;
  const auto leaves = net.parameter_leaves(tape);
  const ad::Var out = net.forward(tape, leaves, input);
  const Vec6 fast = net.forward(input);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(out.value()(i, 0), fast(i));
}

TEST(BiasNet, PredictionIsDeterministicAndReplicated) {
  std::mt19937_64 rng(3);
  const BiasNet net = randomized(small_arch(), 5);
  const auto window = random_samples(rng, 40);
  const auto a = predict_bias(net, window);
  const auto b = predict_bias(net, window);
  ASSERT_EQ(a.size(), 40u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].stacked(), b[k].stacked());
    EXPECT_EQ(a[k].stacked(), a[0].stacked());
  }
}

TEST(BiasNet, WrongWindowLength) {
  std::mt19937_64 rng(4);
  const BiasNet net(small_arch(), 1);
  EXPECT_THROW(predict_bias(net, random_samples(rng, 39)), InvalidArgument);
  EXPECT_THROW(net.normalized_input(random_samples(rng, 41)), InvalidArgument);
}

TEST(BiasNet, Normalization) {
  std::mt19937_64 rng(5);
  BiasNet net(small_arch(), 1);
  net.normalization.mean << 1, 2, 3, 4, 5, 6;
  net.normalization.stddev << 2, 2, 2, 4, 4, 4;
  const auto window = random_samples(rng, 40);
  const Eigen::MatrixXd in = net.normalized_input(window);
  EXPECT_NEAR(in(0, 3), (window[3].omega.x() - 1) / 2, 1e-15);
  EXPECT_NEAR(in(5, 7), (window[7].accel.z() - 6) / 4, 1e-15);
}

TEST(BiasStream, ParallelMatchesReference) {
  std::mt19937_64 rng(6);
  const BiasNet net = randomized(small_arch(), 6);
  const auto samples = random_samples(rng, 300);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  for (int stride : {1, 7}) {
    const auto par = predict_bias_stream(net, samples, stride);
    const auto ref = reference::predict_bias_stream(net, samples, stride);
    ASSERT_EQ(par.size(), samples.size());
    for (std::size_t k = 0; k < par.size(); ++k) EXPECT_EQ(par[k].stacked(), ref[k].stacked());
  }
  omp_set_num_threads(saved);
}

TEST(BiasStream, CausalWindowsAndHold) {
  std::mt19937_64 rng(7);
  const BiasNet net = randomized(small_arch(), 7);
  const auto samples = random_samples(rng, 120);
  const auto out = predict_bias_stream(net, samples, 5);
  for (std::size_t k = 0; k + 1 < 40; ++k) EXPECT_EQ(out[k].stacked(), Vec6::Zero());
  // Sample 39 ends the first full window.
  const auto first = predict_bias(net, std::span(samples).first(40));
  EXPECT_EQ(out[39].stacked(), first[0].stacked());
  for (std::size_t k = 40; k < 44; ++k) EXPECT_EQ(out[k].stacked(), out[39].stacked());
  const auto later = predict_bias(net, std::span(samples).subspan(5, 40));
  EXPECT_EQ(out[44].stacked(), later[0].stacked());
}

TEST(BiasStream, RejectsNonFinite) {
  std::mt19937_64 rng(8);
  const BiasNet net(small_arch(), 1);
  auto samples = random_samples(rng, 100);
  samples[50].accel.x() = NAN;
  EXPECT_THROW(predict_bias_stream(net, samples), InvalidArgument);
}

TEST(Checkpoint, RoundTrip) {
  std::mt19937_64 rng(9);
  BiasNet net = randomized(small_arch(), 9);
  net.epochs_trained = 17;
  net.normalization.mean << 1, 2, 3, 4, 5, 6;
  net.normalization.stddev << .1, .2, .3, .4, .5, .6;
  std::stringstream buffer;
  save_checkpoint(net, buffer);
  const std::string bytes = buffer.str();
  const BiasNet back = load_checkpoint(buffer);
  EXPECT_EQ(back.architecture(), net.architecture());
  EXPECT_EQ(back.epochs_trained, 17);
  EXPECT_EQ(back.normalization.mean, net.normalization.mean);
  EXPECT_EQ(back.normalization.stddev, net.normalization.stddev);
  for (std::size_t i = 0; i < net.parameters().size(); ++i) EXPECT_EQ(back.parameters()[i], net.parameters()[i]);
  std::stringstream again;
  save_checkpoint(back, again);
  EXPECT_EQ(again.str(), bytes);
  EXPECT_EQ(bytes.substr(0, 8), std::string("INVBIAS\0", 8));
}

TEST(Checkpoint, CorruptInput) {
  const BiasNet net(small_arch(), 1);
  std::stringstream buffer;
  save_checkpoint(net, buffer);
  const std::string bytes = buffer.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream s1(bad_magic);
  EXPECT_THROW(load_checkpoint(s1), DataError);

  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::stringstream s2(bad_version);
  EXPECT_THROW(load_checkpoint(s2), DataError);

  std::stringstream s3(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_checkpoint(s3), DataError);

  EXPECT_THROW(load_checkpoint(std::filesystem::path("/nonexistent/net.bin")), IoError);
}
