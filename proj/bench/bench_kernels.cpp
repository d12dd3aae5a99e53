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

// Parallel kernels against their serial references. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <numeric>

#include "invio/dataio.hpp"
#include "invio/kernels.hpp"
#include "invio/train.hpp"

namespace {

using namespace invio;

struct ConvCase {
  Eigen::MatrixXd input, weight, bias, grad_out, out;
  kernels::Conv1dShape shape;
};

ConvCase make_conv(const benchmark::State& state) {
  ConvCase c;
  const int cin = static_cast<int>(state.range(0));
  const int cout = static_cast<int>(state.range(1));
  const int length = static_cast<int>(state.range(2));
  c.input = Eigen::MatrixXd::Random(cin, length);
  c.weight = Eigen::MatrixXd::Random(cout, cin * 7);
  c.bias = Eigen::MatrixXd::Random(cout, 1);
  c.shape = kernels::conv1d_shape(c.input, c.weight, c.bias, 1, 3);
  c.grad_out = Eigen::MatrixXd::Random(cout, c.shape.out_length());
  return c;
}

void ConvArgs(benchmark::internal::Benchmark* b) {
  b->Args({6, 32, 200})->Args({32, 64, 200})->Args({64, 128, 100})->Args({128, 128, 50});
}

void BM_ConvForwardParallel(benchmark::State& state) {
  ConvCase c = make_conv(state);
  for (auto _ : state) {
    kernels::conv1d_forward(c.input, c.weight, c.bias, c.shape, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
  state.counters["threads"] = kernels::max_threads();
}
BENCHMARK(BM_ConvForwardParallel)->Apply(ConvArgs);

void BM_ConvForwardReference(benchmark::State& state) {
  ConvCase c = make_conv(state);
  for (auto _ : state) {
    kernels::reference::conv1d_forward(c.input, c.weight, c.bias, c.shape, c.out);
    benchmark::DoNotOptimize(c.out.data());
  }
}
BENCHMARK(BM_ConvForwardReference)->Apply(ConvArgs);

void BM_ConvBackwardParallel(benchmark::State& state) {
  ConvCase c = make_conv(state);
  Eigen::MatrixXd gi, gw, gb;
  for (auto _ : state) {
    kernels::conv1d_backward(c.input, c.weight, c.grad_out, c.shape, &gi, &gw, &gb);
    benchmark::DoNotOptimize(gw.data());
  }
  state.counters["threads"] = kernels::max_threads();
}
BENCHMARK(BM_ConvBackwardParallel)->Apply(ConvArgs);

void BM_ConvBackwardReference(benchmark::State& state) {
  ConvCase c = make_conv(state);
  Eigen::MatrixXd gi, gw, gb;
  for (auto _ : state) {
    kernels::reference::conv1d_backward(c.input, c.weight, c.grad_out, c.shape, &gi, &gw, &gb);
    benchmark::DoNotOptimize(gw.data());
  }
}
BENCHMARK(BM_ConvBackwardReference)->Apply(ConvArgs);

struct TrainingData {
  BiasNet net;
  std::vector<TrainSegment> segments;
  std::vector<std::size_t> indices;
};

const TrainingData& training_data() {
  static const TrainingData data = [] {
    TrajectorySpec spec;
    spec.duration = 8.0;
    spec.landmark_count = 1;
    const Dataset d = synthesize(spec).dataset;
    std::vector<ExtendedPose> states;
    for (const auto& g : d.ground_truth) states.push_back(g.pose);
    TrainingData t{BiasNet(NetArchitecture{}, 1), make_segments(d.imu, states, 200), {}};
    t.indices.resize(t.segments.size());
    std::iota(t.indices.begin(), t.indices.end(), 0);
    return t;
  }();
  return data;
}

void BM_BatchGradientParallel(benchmark::State& state) {
  const TrainingData& t = training_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_gradient(t.net, t.segments, t.indices, LossConfig{}, NoiseParams{}).loss);
  }
  state.counters["segments"] = static_cast<double>(t.indices.size());
}
BENCHMARK(BM_BatchGradientParallel)->Unit(benchmark::kMillisecond);

void BM_BatchGradientReference(benchmark::State& state) {
  const TrainingData& t = training_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::batch_gradient(t.net, t.segments, t.indices, LossConfig{}, NoiseParams{}).loss);
  }
}
BENCHMARK(BM_BatchGradientReference)->Unit(benchmark::kMillisecond);

const std::vector<ImuSample>& stream() {
  static const std::vector<ImuSample> samples = [] {
    TrajectorySpec spec;
    spec.duration = 5.0;
    spec.landmark_count = 1;
    return synthesize(spec).dataset.imu;
  }();
  return samples;
}

void BM_BiasStreamParallel(benchmark::State& state) {
  const BiasNet net(NetArchitecture{}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(predict_bias_stream(net, stream(), 10).data());
}
BENCHMARK(BM_BiasStreamParallel)->Unit(benchmark::kMillisecond);

void BM_BiasStreamReference(benchmark::State& state) {
  const BiasNet net(NetArchitecture{}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::predict_bias_stream(net, stream(), 10).data());
}
BENCHMARK(BM_BiasStreamReference)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
