// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "futurefoul/error.hpp"
#include "futurefoul/types.hpp"

namespace futurefoul {
namespace {

TEST(Geometry, BboxCenter) {
  const Point c = bbox_center({10, 20, 30, 40});
  EXPECT_DOUBLE_EQ(c.x, 25.0);
  EXPECT_DOUBLE_EQ(c.y, 40.0);
}

TEST(Geometry, EuclideanIsPythagorean) {
  EXPECT_DOUBLE_EQ(euclidean({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(euclidean({-1, 2}, {-1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(euclidean({1, 1}, {4, 5}), euclidean({4, 5}, {1, 1}));
}

TEST(Geometry, FootPositionNormalisesBottomCentre) {
  const Point f = foot_position({100, 50, 20, 60}, 640, 360);
  EXPECT_DOUBLE_EQ(f.x, 110.0 / 640.0);
  EXPECT_DOUBLE_EQ(f.y, 110.0 / 360.0);
}

TEST(Geometry, FootPositionIsNotClamped) {
  const Point f = foot_position({630, 340, 40, 40}, 640, 360);
  EXPECT_GT(f.x, 1.0);
  EXPECT_GT(f.y, 1.0);
}

TEST(Geometry, FootPositionRejectsEmptyFrame) {
  EXPECT_THROW(foot_position({0, 0, 1, 1}, 0, 360), std::invalid_argument);
  EXPECT_THROW(foot_position({0, 0, 1, 1}, 640, -1), std::invalid_argument);
}

TEST(BBoxTest, Validity) {
  EXPECT_TRUE((BBox{0, 0, 0, 0}).valid());
  EXPECT_FALSE((BBox{0, 0, -1, 2}).valid());
  EXPECT_FALSE((BBox{std::numeric_limits<double>::quiet_NaN(), 0, 1, 1}).valid());
  EXPECT_FALSE((BBox{0, std::numeric_limits<double>::infinity(), 1, 1}).valid());
}

TEST(Pose, RequiresSeventeenPoints) {
  std::vector<Keypoint> sixteen(16);
  EXPECT_THROW(PoseKeypoints{sixteen}, std::invalid_argument);
  std::vector<Keypoint> points(17);
  points[3] = {1, 2, true};
  points[5] = {3, 4, true};
  const PoseKeypoints pose(points);
  EXPECT_EQ(pose.visible_count(), 2u);
  EXPECT_EQ(pose[Joint::LeftEar].x, 1.0);
}

TEST(Pose, JointNamesFollowCocoOrder) {
  EXPECT_EQ(joint_name(Joint::Nose), "nose");
  EXPECT_EQ(joint_name(Joint::RightAnkle), "right_ankle");
  EXPECT_EQ(static_cast<std::size_t>(Joint::RightAnkle), 16u);
}

TEST(LabelText, RoundTrip) {
  EXPECT_EQ(to_string(Label::Foul), "FOUL");
  EXPECT_EQ(to_string(Label::NonFoul), "NON_FOUL");
  EXPECT_EQ(parse_label("foul"), Label::Foul);
  EXPECT_EQ(parse_label("Non_Foul"), Label::NonFoul);
  EXPECT_FALSE(parse_label("goal").has_value());
}

TEST(RejectReasonText, RoundTrip) {
  for (auto r : {RejectReason::NoBall, RejectReason::InsufficientContext, RejectReason::ExcludedLabel,
                 RejectReason::TooFewPlayers, RejectReason::LostTrack}) {
    EXPECT_EQ(parse_reject_reason(to_string(r)), r);
  }
  EXPECT_EQ(to_string(RejectReason::LostTrack), "LOST_TRACK");
  EXPECT_FALSE(parse_reject_reason("nope").has_value());
}

TEST(MatchLookup, FindFrameAndSecond) {
  MatchAnnotation m;
  m.fps = 25;
  for (int i : {2, 5, 9}) m.frames.push_back({i, std::nullopt, {}});
  EXPECT_EQ(m.find_frame(5)->index, 5);
  EXPECT_EQ(m.find_frame(4), nullptr);
  EXPECT_EQ(m.frame_at_second(3), 75);
  m.fps = 29.97;
  EXPECT_EQ(m.frame_at_second(3), 90);
}

TEST(ResultCarrier, HoldsValueOrReason) {
  Result<int> ok(4);
  Result<int> bad(RejectReason::NoBall);
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.value(), 4);
  EXPECT_FALSE(bad);
  EXPECT_EQ(bad.reason(), RejectReason::NoBall);
  EXPECT_THROW((void)bad.value(), Error);
}

}  // namespace
}  // namespace futurefoul
