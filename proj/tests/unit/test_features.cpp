// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "futurefoul/dataset.hpp"
#include "futurefoul/features.hpp"
#include "futurefoul/sample_io.hpp"
#include "futurefoul/synth.hpp"
#include "test_support.hpp"

namespace futurefoul {
namespace {

TEST(Subsample, PinnedFourOfSeventyFive) {
  EXPECT_EQ(subsample_indices(75, 4), (std::vector<int>{0, 24, 49, 74}));
}

TEST(Subsample, EvenSpreadOtherwise) {
  EXPECT_EQ(subsample_indices(75, 2), (std::vector<int>{0, 74}));
  EXPECT_EQ(subsample_indices(75, 75).back(), 74);
  for (int n : {8, 15, 25, 35, 45}) {
    const auto idx = subsample_indices(75, n);
    ASSERT_EQ(static_cast<int>(idx.size()), n);
    EXPECT_EQ(idx.front(), 0);
    EXPECT_EQ(idx.back(), 74);
    for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LT(idx[i - 1], idx[i]);
  }
}

TEST(Subsample, Bounds) {
  EXPECT_THROW(subsample_indices(75, 1), std::invalid_argument);
  EXPECT_THROW(subsample_indices(75, 76), std::invalid_argument);
}

TEST(Crop, ClampsToFrame) {
  Image frame(100, 50, 0.0f);
  fill_rect(frame, 0, 0, 10, 10, {255, 0, 0});
  // Half of this box lies left of the frame; the visible half is all red.
  const PlayerCrop c = crop_player(frame, {-10, 0, 20, 10}, 8);
  EXPECT_FALSE(c.degenerate);
  EXPECT_EQ(c.image.width(), 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) EXPECT_NEAR(c.image.at(y, x, 0), 1.0f, 1e-6f);
  }
}

TEST(Crop, OutsideOrEmptyIsDegenerate) {
  Image frame(100, 50, 0.5f);
  EXPECT_TRUE(crop_player(frame, {200, 10, 20, 20}, 8).degenerate);
  EXPECT_TRUE(crop_player(frame, {10, 10, 0, 20}, 8).degenerate);
  const PlayerCrop c = crop_player(frame, {200, 10, 20, 20}, 8);
  EXPECT_EQ(c.image, Image(8, 8, 0.0f));
}

TEST(ImageOps, ResizeConstantImage) {
  Image img(7, 5, 0.25f);
  const Image r = resize_image(img, 3, 9);
  EXPECT_EQ(r.width(), 3);
  EXPECT_EQ(r.height(), 9);
  for (float v : r.data()) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(ImageOps, PngRoundTripIsExactOnBytes) {
  testing::TempDir dir;
  Image img(5, 4);
  for (std::size_t i = 0; i < img.data().size(); ++i) img.data()[i] = static_cast<float>(i % 256) / 255.0f;
  write_png(dir / "x.png", img);
  const Image back = read_png(dir / "x.png");
  ASSERT_EQ(back.width(), 5);
  for (std::size_t i = 0; i < img.data().size(); ++i) EXPECT_EQ(to_byte(back.data()[i]), to_byte(img.data()[i]));
}

struct Built {
  MatchAnnotation match;
  TrackSet trackset;
};

Built one_trackset(std::uint64_t seed) {
  Built b{generate_match(testing::small_synth(2, seed)), {}};
  b.trackset = build_trackset(b.match, b.match.events[1], Label::Foul).value();
  return b;
}

TEST(BuildSample, ShapesFollowConfig) {
  const Built b = one_trackset(3);
  const RenderedFrameSource frames(b.match);
  for (int n : {4, 8, 15}) {
    for (int S : {16, 32}) {
      const FeatureConfig cfg = testing::tiny_features(n, S, 12);
      const Sample s = build_sample(b.trackset, frames, cfg);
      const auto un = static_cast<std::size_t>(n);
      EXPECT_EQ(s.video.size(), un * 3 * S * S);
      EXPECT_EQ(s.feet.size(), un * 5 * 2);
      EXPECT_EQ(s.poses.size(), un * 5 * 17 * 2);
      EXPECT_EQ(s.crops.size(), un * 5 * 3 * 12 * 12);
      EXPECT_EQ(s.bboxes.size(), un * 5 * 4);
      EXPECT_EQ(s.held.size(), un * 5);
      EXPECT_EQ(s.meta.frame_indices.size(), un);
    }
  }
}

TEST(BuildSample, NumericFeaturesMatchTracks) {
  const Built b = one_trackset(4);
  const RenderedFrameSource frames(b.match);
  const Sample s = build_sample(b.trackset, frames, testing::tiny_features());
  const auto idx = subsample_indices(75, 4);
  for (std::size_t p = 0; p < 5; ++p) EXPECT_EQ(s.meta.player_refs[p], b.trackset.players[p].player_ref);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(s.meta.frame_indices[t], b.trackset.window.start_frame + idx[t]);
    for (std::size_t p = 0; p < 5; ++p) {
      const TrackEntry& e = b.trackset.players[p].entries[static_cast<std::size_t>(idx[t])];
      const std::size_t fp = (t * 5 + p);
      // Foot: bottom centre over the frame size.
      EXPECT_NEAR(s.feet[fp * 2], (e.bbox.x + e.bbox.w / 2) / 640.0, 6e-7);
      EXPECT_NEAR(s.feet[fp * 2 + 1], (e.bbox.y + e.bbox.h) / 360.0, 6e-7);
      EXPECT_NEAR(s.bboxes[fp * 4 + 2], e.bbox.w, 6e-7);
      for (std::size_t k = 0; k < 17; ++k) {
        const Keypoint& kp = e.pose[k];
        const double x = s.poses[(fp * 17 + k) * 2];
        if (!kp.visible) {
          EXPECT_EQ(x, 0.0);
        } else {
          EXPECT_NEAR(x, kp.x / 640.0, 6e-7);
        }
      }
    }
  }
}

TEST(BuildSample, VideoIsResizedFrame) {
  const Built b = one_trackset(5);
  const RenderedFrameSource frames(b.match);
  const Sample s = build_sample(b.trackset, frames, testing::tiny_features(4, 16, 16));
  const Image expect = resize_image(frames.frame(s.meta.frame_indices[2]), 16);
  const std::size_t base = 2 * s.video_frame_size();
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        EXPECT_EQ(s.video[base + static_cast<std::size_t>(c * 256 + y * 16 + x)], to_byte(expect.at(y, x, c)));
      }
    }
  }
}

TEST(BuildSample, MissingFrameIsNamed) {
  const Built b = one_trackset(6);
  testing::TempDir empty;
  const DirectoryFrameSource frames(empty.path());
  try {
    build_sample(b.trackset, frames, testing::tiny_features());
    FAIL();
  } catch (const MissingFrameError& e) {
    EXPECT_EQ(e.frame_index(), b.trackset.window.start_frame);
    EXPECT_NE(std::string(e.what()).find(std::to_string(e.frame_index())), std::string::npos);
  }
}

TEST(BuildSample, Deterministic) {
  const Built b = one_trackset(7);
  const RenderedFrameSource frames(b.match);
  EXPECT_EQ(build_sample(b.trackset, frames, testing::tiny_features()),
            build_sample(b.trackset, frames, testing::tiny_features()));
}

TEST(SampleIo, RoundTripIsExact) {
  const Built b = one_trackset(8);
  const RenderedFrameSource frames(b.match);
  const Sample s = build_sample(b.trackset, frames, testing::tiny_features(8, 16, 16));
  testing::TempDir dir;
  write_sample(dir / "s", s);
  EXPECT_EQ(read_sample(dir / "s"), s);
}

TEST(SampleIo, FixedSixDecimals) {
  EXPECT_EQ(format_fixed6(0.5), "0.500000");
  EXPECT_EQ(format_fixed6(-1.25), "-1.250000");
  EXPECT_EQ(round6(0.1234565), 0.123457);
}

TEST(SampleIo, ManifestSplits) {
  testing::TempDir dir;
  SampleManifest m;
  m.config = testing::tiny_features();
  m.entries.push_back({"a_t4", "a", 4, Label::Foul, Split::Train});
  m.entries.push_back({"a_t9", "a", 9, Label::NonFoul, Split::Test});
  m.save(dir / "manifest.json");
  const SampleManifest back = SampleManifest::load(dir / "manifest.json");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].split, Split::Test);
  EXPECT_TRUE(back.has_split());
  EXPECT_EQ(back.config, m.config);
}

TEST(FeatureConfigTest, Validation) {
  EXPECT_THROW(testing::tiny_features(1).validate(), ConfigError);
  EXPECT_THROW(testing::tiny_features(4, 0).validate(), ConfigError);
  EXPECT_TRUE(FeatureConfig{}.in_reference_grid());
  EXPECT_FALSE(testing::tiny_features(4, 16).in_reference_grid());
}

}  // namespace
}  // namespace futurefoul
