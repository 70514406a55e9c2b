// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/qualitative.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#include "futurefoul/error.hpp"
#include "json.hpp"

namespace futurefoul {

namespace {

using nlohmann::ordered_json;

constexpr std::array<Rgb, kTrackedPlayers> kChannelColors{{
    {255, 60, 60}, {60, 120, 255}, {255, 220, 0}, {200, 80, 255}, {255, 140, 0},
}};

struct Canvas {
  int width = kOverlayWidth;
  int height = 0;
  double sx = 1.0;
  double sy = 1.0;
};

Canvas canvas_for(const Sample& s) {
  Canvas c;
  c.height = std::max(1, static_cast<int>(std::lround(static_cast<double>(kOverlayWidth) * s.meta.frame_height /
                                                       std::max(1, s.meta.frame_width))));
  c.sx = static_cast<double>(c.width) / s.meta.frame_width;
  c.sy = static_cast<double>(c.height) / s.meta.frame_height;
  return c;
}

Image global_frame(const Sample& s, int t) {
  const int S = s.config.global_size;
  Image img(S, S);
  const std::uint8_t* src = s.video.data() + static_cast<std::size_t>(t) * s.video_frame_size();
  const std::size_t plane = static_cast<std::size_t>(S) * S;
  for (int y = 0; y < S; ++y) {
    for (int x = 0; x < S; ++x) {
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) = src[c * plane + static_cast<std::size_t>(y) * S + x] / 255.0f;
      }
    }
  }
  return img;
}

const double* bbox_of(const Sample& s, int t, std::size_t p) {
  return s.bboxes.data() + (static_cast<std::size_t>(t) * kTrackedPlayers + p) * 4;
}

const double* pose_of(const Sample& s, int t, std::size_t p) {
  return s.poses.data() + (static_cast<std::size_t>(t) * kTrackedPlayers + p) * kKeypointCount * 2;
}

}  // namespace

std::string_view to_string(CaseCategory c) noexcept {
  switch (c) {
    case CaseCategory::TruePositive: return "true_positive";
    case CaseCategory::TrueNegative: return "true_negative";
    case CaseCategory::Missed: return "missed";
    case CaseCategory::FalseAlarm: return "false_alarm";
  }
  return "unknown";
}

CaseCategory categorize(Label predicted, Label actual) noexcept {
  if (actual == Label::Foul) return predicted == Label::Foul ? CaseCategory::TruePositive : CaseCategory::Missed;
  return predicted == Label::Foul ? CaseCategory::FalseAlarm : CaseCategory::TrueNegative;
}

Rgb channel_color(std::size_t channel) noexcept { return kChannelColors[channel % kChannelColors.size()]; }

Image render_overlay(const Sample& s) {
  const Canvas cv = canvas_for(s);
  const int n = s.n_frames();
  Image strip(cv.width * n, cv.height);
  for (int t = 0; t < n; ++t) {
    Image frame = resize_image(global_frame(s, t), cv.width, cv.height);
    for (std::size_t p = 0; p < kTrackedPlayers; ++p) {
      const Rgb color = channel_color(p);
      const double* b = bbox_of(s, t, p);
      draw_rect(frame, b[0] * cv.sx, b[1] * cv.sy, b[2] * cv.sx, b[3] * cv.sy, color, 1);
      const double* k = pose_of(s, t, p);
      for (const auto& [ja, jb] : kSkeletonEdges) {
        const auto a = static_cast<std::size_t>(ja);
        const auto c = static_cast<std::size_t>(jb);
        const bool va = k[2 * a] != 0.0 || k[2 * a + 1] != 0.0;
        const bool vc = k[2 * c] != 0.0 || k[2 * c + 1] != 0.0;
        if (!va || !vc) continue;
        draw_line(frame, k[2 * a] * cv.width, k[2 * a + 1] * cv.height, k[2 * c] * cv.width, k[2 * c + 1] * cv.height,
                  color);
      }
    }
    for (int y = 0; y < cv.height; ++y) {
      for (int x = 0; x < cv.width; ++x) {
        for (int c = 0; c < 3; ++c) strip.at(y, t * cv.width + x, c) = frame.at(y, x, c);
      }
    }
  }
  return strip;
}

QualitativeSummary dump_qualitative(std::span<const Sample* const> samples, const Evaluation& ev,
                                    const std::filesystem::path& out, int per_category) {
  if (ev.predicted.size() != samples.size()) throw std::invalid_argument("dump_qualitative: evaluation size mismatch");
  QualitativeSummary summary;
  for (auto c : kCaseCategories) std::filesystem::create_directories(out / std::string(to_string(c)));

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = *samples[i];
    const auto cat = categorize(ev.predicted[i], s.label);
    const auto ci = static_cast<std::size_t>(cat);
    ++summary.available[ci];
    if (summary.written[ci] >= static_cast<std::size_t>(std::max(0, per_category))) continue;
    ++summary.written[ci];

    const auto dir = out / std::string(to_string(cat));
    write_png(dir / (s.name() + ".png"), render_overlay(s));

    const Canvas cv = canvas_for(s);
    ordered_json j;
    j["sample"] = s.name();
    j["category"] = std::string(to_string(cat));
    j["label"] = std::string(to_string(s.label));
    j["predicted"] = std::string(to_string(ev.predicted[i]));
    j["foul_probability"] = ev.foul_probability[i];
    j["frame_width"] = s.meta.frame_width;
    j["frame_height"] = s.meta.frame_height;
    j["canvas"] = {{"width", cv.width}, {"height", cv.height}, {"scale_x", cv.sx}, {"scale_y", cv.sy}};
    ordered_json frames = ordered_json::array();
    for (int t = 0; t < s.n_frames(); ++t) {
      ordered_json f;
      f["t"] = t;
      f["frame_index"] = s.meta.frame_indices[static_cast<std::size_t>(t)];
      f["canvas_offset_x"] = t * cv.width;
      ordered_json players = ordered_json::array();
      for (std::size_t p = 0; p < kTrackedPlayers; ++p) {
        const double* b = bbox_of(s, t, p);
        const Rgb color = channel_color(p);
        players.push_back({{"channel", p},
                           {"player_ref", s.meta.player_refs[p]},
                           {"color", {color[0], color[1], color[2]}},
                           {"bbox_px", {b[0], b[1], b[2], b[3]}},
                           {"bbox_canvas", {b[0] * cv.sx, b[1] * cv.sy, b[2] * cv.sx, b[3] * cv.sy}},
                           {"foot", {s.feet[(static_cast<std::size_t>(t) * kTrackedPlayers + p) * 2],
                                     s.feet[(static_cast<std::size_t>(t) * kTrackedPlayers + p) * 2 + 1]}}});
      }
      f["players"] = std::move(players);
      frames.push_back(std::move(f));
    }
    j["frames"] = std::move(frames);
    std::ofstream side(dir / (s.name() + ".json"), std::ios::binary);
    if (!side) throw Error("cannot write sidecar for " + s.name());
    side << j.dump(2) << "\n";
  }

  ordered_json sj;
  std::string text;
  for (auto c : kCaseCategories) {
    const auto ci = static_cast<std::size_t>(c);
    sj[std::string(to_string(c))] = {{"available", summary.available[ci]}, {"written", summary.written[ci]}};
    text += fmt::format("{:<14} {:>4} of {:>4}{}\n", to_string(c), summary.written[ci], summary.available[ci],
                        summary.available[ci] == 0 ? "  (no cases in this category)" : "");
  }
  std::ofstream(out / "summary.json", std::ios::binary) << sj.dump(2) << "\n";
  std::ofstream(out / "summary.txt", std::ios::binary) << text;
  return summary;
}

}  // namespace futurefoul
