// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "futurefoul/pipeline.hpp"
#include "futurefoul/synth.hpp"
#include "test_support.hpp"

namespace futurefoul {
namespace {

TEST(Pipeline, CountingRule) {
  SynthConfig c = testing::small_synth(8, 3);
  c.ball_missing_every = 3;
  MatchAnnotation m = generate_match(c);
  m.events.push_back({"Yellow card", 30});
  const RenderedFrameSource frames(m);
  const BuiltSamples b = build_match_samples(m, frames, testing::tiny_features());
  EXPECT_EQ(b.labelled_events, 8u);
  EXPECT_EQ(b.samples.size(), 6u);
  EXPECT_EQ(b.rejections.size(), 3u);
  EXPECT_EQ(b.labelled_rejections(), 2u);
  EXPECT_EQ(b.samples.size() + b.labelled_rejections(), b.labelled_events);
}

TEST(Pipeline, SamplesMatchTracksetPath) {
  const MatchAnnotation m = generate_match(testing::small_synth(3, 4));
  const RenderedFrameSource frames(m);
  const BuiltSamples b = build_match_samples(m, frames, testing::tiny_features());
  const auto direct = testing::synth_samples(3, 4, testing::tiny_features());
  EXPECT_EQ(b.samples, direct);
}

TEST(RejectionLog, RoundTrip) {
  testing::TempDir dir;
  const std::vector<Rejection> r{{"a", 4, RejectReason::NoBall}, {"b c", 9, RejectReason::LostTrack},
                                 {"a", 2, RejectReason::ExcludedLabel}};
  write_rejection_log(dir / "r.txt", r);
  EXPECT_EQ(read_rejection_log(dir / "r.txt"), r);
}

TEST(SamplesDir, RoundTripWithSplits) {
  testing::TempDir dir;
  const auto samples = testing::synth_samples(3, 5, testing::tiny_features());
  write_samples_dir(dir.path(), samples, testing::tiny_features(), {Split::Train, Split::Val, Split::Test});
  const LoadedSamples back = load_samples_dir(dir.path());
  EXPECT_EQ(back.samples, samples);
  ASSERT_TRUE(back.manifest.has_split());
  EXPECT_EQ(back.manifest.entries[2].split, Split::Test);
  EXPECT_EQ(back.manifest.entries[0].dir, samples[0].name());
}

TEST(SamplesDir, SplitCountMustMatch) {
  testing::TempDir dir;
  const auto samples = testing::synth_samples(2, 6, testing::tiny_features());
  EXPECT_ANY_THROW(write_samples_dir(dir.path(), samples, testing::tiny_features(), {Split::Train}));
}

}  // namespace
}  // namespace futurefoul
