// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "futurefoul/dataset.hpp"
#include "futurefoul/features.hpp"
#include "futurefoul/rng.hpp"
#include "futurefoul/synth.hpp"

namespace ff = futurefoul;

namespace {

ff::MatchAnnotation match(int events) {
  ff::SynthConfig c;
  c.n_events = events;
  c.seed = 3;
  return ff::generate_match(c);
}

void BM_SelectAnchorPlayers(benchmark::State& state) {
  ff::FrameAnnotation f;
  f.ball = ff::BBox{300, 170, 10, 10};
  ff::Rng rng(1);
  for (int r = 0; r < state.range(0); ++r) {
    f.players.push_back({r, {rng.uniform(0, 620), rng.uniform(0, 310), 20, 50}, std::nullopt});
  }
  for (auto _ : state) benchmark::DoNotOptimize(ff::select_anchor_players(f));
}
BENCHMARK(BM_SelectAnchorPlayers)->Arg(8)->Arg(22);

void BM_GreedyAssign(benchmark::State& state) {
  ff::Rng rng(2);
  std::vector<ff::Point> tracks(5);
  std::vector<ff::Point> cands(static_cast<std::size_t>(state.range(0)));
  for (auto& p : tracks) p = {rng.uniform(0, 640), rng.uniform(0, 360)};
  for (auto& p : cands) p = {rng.uniform(0, 640), rng.uniform(0, 360)};
  for (auto _ : state) benchmark::DoNotOptimize(ff::greedy_assign(tracks, cands, 64.0));
}
BENCHMARK(BM_GreedyAssign)->Arg(8)->Arg(22);

void BM_BuildTracksets(benchmark::State& state) {
  const auto m = match(10);
  for (auto _ : state) benchmark::DoNotOptimize(ff::build_tracksets(m));
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_BuildTracksets)->Unit(benchmark::kMicrosecond);

// Rendering dominates; Arg is the crop side.
void BM_BuildSample(benchmark::State& state) {
  const auto m = match(1);
  const auto ts = ff::build_tracksets(m).tracksets.at(0);
  const ff::RenderedFrameSource frames(m);
  ff::FeatureConfig f;
  f.crop_size = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ff::build_sample(ts, frames, f));
}
BENCHMARK(BM_BuildSample)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
