// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "futurefoul/annotation.hpp"
#include "futurefoul/synth.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace futurefoul {
namespace {

using nlohmann::json;

json player(int ref, double x, double y, bool with_pose = true) {
  json p{{"player_ref", ref}, {"bbox", {{"x", x}, {"y", y}, {"w", 20}, {"h", 50}}}};
  if (with_pose) {
    json kps = json::array();
    for (int k = 0; k < 17; ++k) kps.push_back({x + k, y + k, k % 2});
    p["keypoints"] = kps;
  } else {
    p["keypoints"] = nullptr;
  }
  return p;
}

json doc_with(json events, json frames) {
  return {{"match_id", "g1"}, {"fps", 25}, {"width", 640}, {"height", 360}, {"events", events}, {"frames", frames}};
}

json simple_doc() {
  json frames = json::array();
  frames.push_back({{"index", 100}, {"ball", {{"x", 300}, {"y", 150}, {"w", 10}, {"h", 10}}},
                    {"players", {player(1, 100, 100), player(2, 200, 120, false)}}});
  frames.push_back({{"index", 99}, {"ball", nullptr}, {"players", json::array()}});
  return doc_with({{{"label", "Foul"}, {"time_s", 4}}}, frames);
}

TEST(Classify, CaseInsensitiveTags) {
  EXPECT_EQ(classify_event("Foul"), EventClass::Foul);
  EXPECT_EQ(classify_event("FOUL"), EventClass::Foul);
  EXPECT_EQ(classify_event("ball out of play"), EventClass::NonFoul);
  EXPECT_EQ(classify_event("Offside"), EventClass::NonFoul);
  EXPECT_EQ(classify_event("Goal"), EventClass::NonFoul);
  EXPECT_EQ(classify_event("Yellow card"), EventClass::Excluded);
  EXPECT_EQ(classify_event("Substitution"), EventClass::Excluded);
}

TEST(Classify, CustomSets) {
  LabelSets sets;
  sets.foul = {"Tackle"};
  EXPECT_EQ(classify_event("tackle", sets), EventClass::Foul);
  EXPECT_EQ(classify_event("Foul", sets), EventClass::Excluded);
}

TEST(Parse, ReadsAndSortsFrames) {
  const MatchAnnotation m = parse_match_text(simple_doc().dump());
  EXPECT_EQ(m.match_id, "g1");
  ASSERT_EQ(m.frames.size(), 2u);
  EXPECT_EQ(m.frames[0].index, 99);
  EXPECT_FALSE(m.frames[0].ball.has_value());
  const auto* p = m.frames[1].find_player(1);
  ASSERT_NE(p, nullptr);
  ASSERT_TRUE(p->pose.has_value());
  EXPECT_TRUE((*p->pose)[1].visible);
  EXPECT_EQ((*p->pose)[2], (Keypoint{0, 0, false}));  // invisible points are zero-filled
  EXPECT_FALSE(m.frames[1].find_player(2)->pose.has_value());
}

TEST(Parse, SyntaxErrorCarriesLine) {
  const std::string text = "{\n  \"match_id\": \"x\",\n  \"fps\": ,\n}";
  try {
    parse_match_text(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Parse, MissingFieldNamesPath) {
  json d = simple_doc();
  d["frames"][0]["players"][1].erase("bbox");
  try {
    parse_match_text(d.dump());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(e.field().find("players[1]"), std::string::npos) << e.field();
  }
}

TEST(Parse, WrongTypeIsParseError) {
  json d = simple_doc();
  d["fps"] = "fast";
  EXPECT_THROW(parse_match_text(d.dump()), ParseError);
}

TEST(Validate, DuplicateFrameIndex) {
  json d = simple_doc();
  d["frames"][1]["index"] = 100;
  try {
    parse_match_text(d.dump());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.frame_index(), 100);
  }
}

TEST(Validate, DuplicatePlayerRef) {
  json d = simple_doc();
  d["frames"][0]["players"][1]["player_ref"] = 1;
  EXPECT_THROW(parse_match_text(d.dump()), ValidationError);
}

TEST(Validate, KeypointCount) {
  json d = simple_doc();
  d["frames"][0]["players"][0]["keypoints"].erase(0);
  try {
    parse_match_text(d.dump());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.frame_index(), 100);
  }
}

TEST(Validate, NegativeBoxSize) {
  json d = simple_doc();
  d["frames"][0]["players"][0]["bbox"]["w"] = -3;
  EXPECT_THROW(parse_match_text(d.dump()), ValidationError);
}

TEST(Validate, NonPositiveFps) {
  json d = simple_doc();
  d["fps"] = 0;
  EXPECT_THROW(parse_match_text(d.dump()), ValidationError);
}

TEST(Serialize, RoundTripIsExact) {
  const MatchAnnotation m = parse_match_text(simple_doc().dump());
  EXPECT_EQ(parse_match_text(serialize_match(m)), m);
}

TEST(Serialize, SyntheticMatchRoundTripsThroughFile) {
  testing::TempDir dir;
  const MatchAnnotation m = generate_match(testing::small_synth(3, 11));
  write_match(dir / "a.json", m);
  EXPECT_EQ(parse_match(dir / "a.json"), m);
}

TEST(Eligibility, ChecksLabelThenContextThenBall) {
  MatchAnnotation m;
  m.match_id = "e";
  m.fps = 25;
  m.width = 640;
  m.height = 360;
  // Anchor frames are time_s * 25.
  m.events = {{"Foul", 2},          // too early: INSUFFICIENT_CONTEXT even without a ball
              {"Yellow card", 1},   // excluded before the context check
              {"Clearance", 10},    // no ball at frame 250
              {"Foul", 20},         // kept
              {"Goal", 30}};        // kept
  for (int idx : {250, 500, 750}) {
    FrameAnnotation f;
    f.index = idx;
    if (idx != 250) f.ball = BBox{1, 1, 2, 2};
    m.frames.push_back(f);
  }
  const Eligibility e = eligible_events(m);
  ASSERT_EQ(e.kept.size(), 2u);
  EXPECT_EQ(e.kept[0].label, Label::Foul);
  EXPECT_EQ(e.kept[1].label, Label::NonFoul);
  ASSERT_EQ(e.rejections.size(), 3u);
  EXPECT_EQ(e.rejections[0].reason, RejectReason::InsufficientContext);
  EXPECT_EQ(e.rejections[1].reason, RejectReason::ExcludedLabel);
  EXPECT_EQ(e.rejections[2].reason, RejectReason::NoBall);
  EXPECT_EQ(e.labelled_rejections(), 2u);
}

TEST(Eligibility, ExactlyThreeSecondsIsEnough) {
  MatchAnnotation m;
  m.fps = 25;
  m.width = m.height = 100;
  m.events = {{"Foul", 3}};
  FrameAnnotation f;
  f.index = 75;
  f.ball = BBox{0, 0, 1, 1};
  m.frames.push_back(f);
  EXPECT_EQ(eligible_events(m).kept.size(), 1u);
}

TEST(Parse, DocumentedExample) {
  const MatchAnnotation m = parse_match(std::filesystem::path(FUTUREFOUL_DOCS_DIR) / "example_match.json");
  EXPECT_EQ(m.frames.front().index, 99);
  EXPECT_FALSE(m.frames.front().ball);
  const auto* p1 = m.find_frame(100)->find_player(1);
  ASSERT_TRUE(p1 && p1->pose);
  EXPECT_FALSE((*p1->pose)[1].visible);
  EXPECT_EQ(classify_event(m.events[1].label_text), EventClass::Excluded);
}

TEST(Parse, UnknownMembersAreIgnored) {
  const MatchAnnotation m = parse_match_text(
      R"({"match_id": "u", "fps": 25, "width": 10, "height": 10, "source": "cam2", "events": [],
          "frames": [{"index": 0, "ball": null, "players": [], "note": 1}]})");
  EXPECT_EQ(m.frames.size(), 1u);
}

}  // namespace
}  // namespace futurefoul
