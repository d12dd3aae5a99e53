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

#include "invio/dataio.hpp"
#include "invio/error.hpp"
#include "invio/train.hpp"

using namespace invio;

namespace {

NetArchitecture tiny_arch(int window) {
  NetArchitecture a;
  a.window = window;
  a.widths = {4, 8};
  a.kernel = 3;
  a.stem_kernel = 3;
  return a;
}

std::vector<TrainSegment> circle_segments(const ImuBias& bias, double duration, int window, std::uint64_t seed,
                                          bool noisy = false) {
  TrajectorySpec spec;
  spec.duration = duration;
  spec.bias_profile = BiasProfile::kConstant;
  spec.bias = bias;
  spec.landmark_count = 1;
  spec.seed = seed;
  if (noisy) spec.noise = NoiseParams::EuRoC();
  const Dataset d = synthesize(spec).dataset;
  std::vector<ExtendedPose> states;
  for (const auto& g : d.ground_truth) states.push_back(g.pose);
  return make_segments(d.imu, states, window);
}

ImuBias test_bias() {
  ImuBias b;
  b.gyro << 0.01, -0.02, 0.015;
  b.accel << 0.05, 0.03, -0.04;
  return b;
}

}  // namespace

TEST(Adam, HandComputedSteps) {
  std::vector<Eigen::MatrixXd> params = {Eigen::MatrixXd::Constant(2, 1, 1.0)};
  std::vector<Eigen::MatrixXd> grads = {(Eigen::MatrixXd(2, 1) << 0.5, -2.0).finished()};
  AdamState state;
  const AdamConfig cfg;
  adam_step(params, grads, state, cfg);
  // Step one: m̂ = g, v̂ = g², so the move is lr·g/(|g|+ε) ≈ lr·sign(g).
  EXPECT_NEAR(params[0](0), 1.0 - cfg.learning_rate * 0.5 / (0.5 + cfg.epsilon), 1e-15);
  EXPECT_NEAR(params[0](1), 1.0 + cfg.learning_rate * 2.0 / (2.0 + cfg.epsilon), 1e-15);
  EXPECT_EQ(state.step, 1);

  const Eigen::MatrixXd before = params[0];
  grads[0] << 1.0, 0.0;
  adam_step(params, grads, state, cfg);
  const double m1 = 0.9 * 0.05 + 0.1 * 1.0, v1 = 0.999 * 0.00025 + 0.001 * 1.0;
  const double mhat = m1 / (1 - 0.81), vhat = v1 / (1 - 0.999 * 0.999);
  EXPECT_NEAR(params[0](0), before(0) - cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon), 1e-15);
}

TEST(Adam, ZeroGradientKeepsParameters) {
  std::vector<Eigen::MatrixXd> params = {Eigen::MatrixXd::Random(3, 4)};
  const auto copy = params;
  AdamState state;
  adam_step(params, {Eigen::MatrixXd::Zero(3, 4)}, state, AdamConfig{});
  EXPECT_EQ(params[0], copy[0]);
}

TEST(Adam, ShapeMismatch) {
  std::vector<Eigen::MatrixXd> params = {Eigen::MatrixXd::Zero(3, 4)};
  AdamState state;
  EXPECT_THROW(adam_step(params, {Eigen::MatrixXd::Zero(4, 3)}, state, AdamConfig{}), InvalidArgument);
}

TEST(BatchGradient, ParallelMatchesReference) {
  const auto segs = circle_segments(test_bias(), 3.0, 20, 1);
  BiasNet net(tiny_arch(20), 1);
  net.parameters().back() << 0.001, 0.002, 0.0, 0.01, 0.0, -0.01;
  std::vector<std::size_t> idx = {4, 0, 7, 2, 9, 11};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const BatchGradient par = batch_gradient(net, segs, idx, LossConfig{}, NoiseParams{});
  omp_set_num_threads(1);
  const BatchGradient one = batch_gradient(net, segs, idx, LossConfig{}, NoiseParams{});
  omp_set_num_threads(saved);
  const BatchGradient ref = reference::batch_gradient(net, segs, idx, LossConfig{}, NoiseParams{});
  EXPECT_EQ(par.loss, ref.loss);
  EXPECT_EQ(one.loss, ref.loss);
  for (std::size_t i = 0; i < ref.grads.size(); ++i) {
    EXPECT_EQ(par.grads[i], ref.grads[i]);
    EXPECT_EQ(one.grads[i], ref.grads[i]);
  }
  double sum = 0.0;
  for (std::size_t i : idx) sum += rollout_loss_value(net, segs[i], LossConfig{}, NoiseParams{});
  EXPECT_NEAR(ref.loss, sum / idx.size(), 1e-12 * ref.loss);
}

TEST(Normalization, MatchesSampleStatistics) {
  const auto segs = circle_segments(ImuBias::Zero(), 2.0, 20, 1);
  const InputNormalization n = fit_normalization(segs, 20);
  Vec6 mean = Vec6::Zero(), sq = Vec6::Zero();
  double count = 0;
  for (const auto& s : segs) {
    for (int k = 0; k < 20; ++k) {
      Vec6 x;
      x << s.samples[k].omega, s.samples[k].accel;
      mean += x;
      sq += x.cwiseProduct(x);
      ++count;
    }
  }
  mean /= count;
  const Vec6 var = sq / count - mean.cwiseProduct(mean);
  EXPECT_LT((n.mean - mean).norm(), 1e-10);
  for (int i = 0; i < 6; ++i) {
    if (var(i) > 1e-12) EXPECT_NEAR(n.stddev(i), std::sqrt(var(i)), 1e-8);
    EXPECT_GT(n.stddev(i), 0.0);
  }
}

TEST(Train, ZeroEpochsReturnsInitial) {
  const auto segs = circle_segments(test_bias(), 2.0, 20, 1);
  const BiasNet net(tiny_arch(20), 3);
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainResult r = train(net, segs, {}, cfg, NoiseParams{});
  EXPECT_TRUE(r.trace.empty());
  for (std::size_t i = 0; i < net.parameters().size(); ++i) EXPECT_EQ(r.net.parameters()[i], net.parameters()[i]);
  EXPECT_EQ(r.net.normalization.mean, net.normalization.mean);
}

TEST(Train, DeterministicAndThreadIndependent) {
  const auto segs = circle_segments(test_bias(), 3.0, 20, 1);
  const BiasNet net(tiny_arch(20), 3);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.seed = 11;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const TrainResult a = train(net, segs, segs, cfg, NoiseParams{});
  omp_set_num_threads(1);
  const TrainResult b = train(net, segs, segs, cfg, NoiseParams{});
  omp_set_num_threads(saved);
  ASSERT_EQ(a.trace.size(), 3u);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].train_loss, b.trace[i].train_loss);
    EXPECT_EQ(a.trace[i].epoch, static_cast<int>(i) + 1);
  }
  for (std::size_t i = 0; i < net.parameters().size(); ++i) EXPECT_EQ(a.net.parameters()[i], b.net.parameters()[i]);
  EXPECT_EQ(a.net.epochs_trained, a.best_epoch);
}

TEST(Train, ReducesLossAndKeepsBestValidation) {
  const auto segs = circle_segments(test_bias(), 4.0, 20, 1);
  const auto val = circle_segments(test_bias(), 2.0, 20, 2);
  const BiasNet net(tiny_arch(20), 3);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 8;
  cfg.adam.learning_rate = 3e-3;
  std::vector<EpochRecord> seen;
  const TrainResult r = train(net, segs, val, cfg, NoiseParams{}, [&](const EpochRecord& e) { seen.push_back(e); });
  ASSERT_EQ(seen.size(), 20u);
  const double initial = mean_loss(net, val, cfg.loss, NoiseParams{});
  EXPECT_LT(r.best_validation_loss, 0.5 * initial);
  double best = seen.front().validation_loss;
  for (const auto& e : seen) best = std::min(best, e.validation_loss);
  EXPECT_EQ(r.best_validation_loss, best);
  EXPECT_NEAR(mean_loss(r.net, val, cfg.loss, NoiseParams{}), best, 1e-9 * best);
}

TEST(Train, DivergenceIsReported) {
  const auto segs = circle_segments(test_bias(), 2.0, 20, 1);
  const BiasNet net(tiny_arch(20), 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.adam.learning_rate = 1e300;
  EXPECT_THROW(train(net, segs, {}, cfg, NoiseParams{}), TrainingDiverged);
}

TEST(Train, RejectsMismatchedWindow) {
  const auto segs = circle_segments(test_bias(), 2.0, 30, 1);
  const BiasNet net(tiny_arch(20), 3);
  EXPECT_THROW(train(net, segs, {}, TrainConfig{}, NoiseParams{}), InvalidArgument);
}
