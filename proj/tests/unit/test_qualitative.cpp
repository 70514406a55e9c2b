// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include "futurefoul/qualitative.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace futurefoul {
namespace {

Evaluation constant(const std::vector<Sample>& samples, Label decision) {
  Evaluation e;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    e.predicted.push_back(decision);
    e.foul_probability.push_back(decision == Label::Foul ? 0.9 : 0.1);
  }
  return e;
}

Evaluation perfect(const std::vector<Sample>& samples) {
  Evaluation e;
  for (const auto& s : samples) {
    e.predicted.push_back(s.label);
    e.foul_probability.push_back(s.label == Label::Foul ? 0.8 : 0.2);
  }
  return e;
}

std::size_t positives(const std::vector<Sample>& samples) {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.label == Label::Foul ? 1 : 0;
  return n;
}

std::size_t files_in(const std::filesystem::path& dir) {
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++n;
  return n;
}

TEST(Categories, Names) {
  EXPECT_EQ(categorize(Label::Foul, Label::Foul), CaseCategory::TruePositive);
  EXPECT_EQ(categorize(Label::NonFoul, Label::Foul), CaseCategory::Missed);
  EXPECT_EQ(categorize(Label::Foul, Label::NonFoul), CaseCategory::FalseAlarm);
  EXPECT_EQ(to_string(CaseCategory::FalseAlarm), "false_alarm");
}

TEST(Dump, PerfectPredictorLeavesErrorCategoriesEmpty) {
  const auto samples = testing::synth_samples(8, 41, testing::tiny_features());
  testing::TempDir out;
  const auto s = dump_qualitative(testing::pointers(samples), perfect(samples), out.path(), 2);
  EXPECT_EQ(s.available[static_cast<std::size_t>(CaseCategory::Missed)], 0u);
  EXPECT_EQ(s.available[static_cast<std::size_t>(CaseCategory::FalseAlarm)], 0u);
  EXPECT_EQ(files_in(out / "missed"), 0u);
  EXPECT_LE(s.written[0], 2u);
  std::ifstream txt(out / "summary.txt");
  const std::string text((std::istreambuf_iterator<char>(txt)), {});
  EXPECT_NE(text.find("no cases"), std::string::npos);
}

TEST(Dump, ConstantNonFoulMissesEveryFoul) {
  const auto samples = testing::synth_samples(8, 42, testing::tiny_features());
  testing::TempDir out;
  const auto s = dump_qualitative(testing::pointers(samples), constant(samples, Label::NonFoul), out.path(), 100);
  EXPECT_EQ(s.available[static_cast<std::size_t>(CaseCategory::Missed)], positives(samples));
  EXPECT_EQ(s.available[static_cast<std::size_t>(CaseCategory::TruePositive)], 0u);
  EXPECT_EQ(files_in(out / "missed"), 2 * positives(samples));
}

TEST(Dump, SidecarBoxesMatchSample) {
  const auto samples = testing::synth_samples(2, 43, testing::tiny_features());
  testing::TempDir out;
  const Evaluation e = perfect(samples);
  dump_qualitative(testing::pointers(samples), e, out.path());
  const Sample& s = samples[0];
  const auto cat = std::string(to_string(categorize(s.label, s.label)));
  std::ifstream in(out / cat / (s.name() + ".json"));
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["label"], std::string(to_string(s.label)));
  const double sx = j["canvas"]["scale_x"];
  for (int t = 0; t < 4; ++t) {
    for (std::size_t p = 0; p < 5; ++p) {
      const auto& pj = j["frames"][t]["players"][p];
      for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_DOUBLE_EQ(pj["bbox_px"][k].get<double>(), s.bboxes[(static_cast<std::size_t>(t) * 5 + p) * 4 + k]);
      }
      EXPECT_DOUBLE_EQ(pj["bbox_canvas"][0].get<double>(), pj["bbox_px"][0].get<double>() * sx);
      EXPECT_EQ(pj["player_ref"], s.meta.player_refs[p]);
    }
  }
  const Image overlay = read_png(out / cat / (s.name() + ".png"));
  EXPECT_EQ(overlay.width(), 4 * kOverlayWidth);
  EXPECT_EQ(overlay.height(), 180);
}

TEST(Dump, SizeMismatchThrows) {
  const auto samples = testing::synth_samples(2, 44, testing::tiny_features());
  testing::TempDir out;
  EXPECT_THROW(dump_qualitative(testing::pointers(samples), Evaluation{}, out.path()), std::invalid_argument);
}

}  // namespace
}  // namespace futurefoul
