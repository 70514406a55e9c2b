// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "futurefoul/model.hpp"
#include "futurefoul/nn/layers.hpp"

namespace ff = futurefoul;

namespace {

ff::nn::Tensor<float> noise(std::vector<int> shape, std::uint64_t seed) {
  ff::nn::Tensor<float> t(std::move(shape));
  ff::Rng rng(seed);
  for (auto& v : t.data) v = static_cast<float>(rng.uniform());
  return t;
}

// Args: image side, batch of images.
void BM_ConvForward(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  ff::Rng rng(1);
  ff::nn::Conv2d<float> conv("c", 3, 16, 3, 2, 1, rng);
  const auto x = noise({N, 3, S, S}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x, false));
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_ConvForward)->Args({64, 16})->Args({224, 4})->Unit(benchmark::kMicrosecond);

void BM_ConvBackward(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  ff::Rng rng(1);
  ff::nn::Conv2d<float> conv("c", 16, 32, 3, 2, 1, rng);
  const auto x = noise({8, 16, S, S}, 3);
  const auto y = conv.forward(x, true);
  const auto dy = noise(y.shape, 4);
  for (auto _ : state) benchmark::DoNotOptimize(conv.backward(dy, true));
}
BENCHMARK(BM_ConvBackward)->Arg(32)->Arg(112)->Unit(benchmark::kMicrosecond);

void BM_CnnEncoder(benchmark::State& state) {
  const int S = static_cast<int>(state.range(0));
  ff::Rng rng(5);
  ff::CnnEncoder<float> enc("e", {16, 32, 64}, 0.3, rng);
  const auto x = noise({20, 3, S, S}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(enc.forward(x, ff::Mode::Eval, rng));
}
BENCHMARK(BM_CnnEncoder)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

// Args: input width, steps. Hidden 256, two layers, batch 32.
void BM_GruForwardBackward(benchmark::State& state) {
  const int I = static_cast<int>(state.range(0));
  const int T = static_cast<int>(state.range(1));
  ff::Rng rng(7);
  ff::GruEncoder<float> gru("g", I, 256, 2, rng);
  const auto x = noise({32, T, I}, 8);
  const auto dlast = noise({32, 256}, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gru.forward(x, ff::Mode::Train));
    benchmark::DoNotOptimize(gru.backward(dlast, false));
  }
}
BENCHMARK(BM_GruForwardBackward)->Args({10, 4})->Args({1024, 4})->Args({1024, 15})->Unit(benchmark::kMicrosecond);

void BM_LinearForward(benchmark::State& state) {
  ff::Rng rng(10);
  ff::nn::Linear<float> fc("fc", 1024, 512, rng);
  const auto x = noise({32, 1024}, 11);
  for (auto _ : state) benchmark::DoNotOptimize(fc.forward(x, false));
}
BENCHMARK(BM_LinearForward)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
