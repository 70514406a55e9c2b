// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "futurefoul/error.hpp"

namespace futurefoul {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char l, char r) {
           return std::tolower(static_cast<unsigned char>(l)) ==
                  std::tolower(static_cast<unsigned char>(r));
         });
}

constexpr std::array<std::string_view, kKeypointCount> kJointNames{
    "nose",          "left_eye",       "right_eye",  "left_ear",    "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
    "right_wrist",   "left_hip",       "right_hip",  "left_knee",   "right_knee",
    "left_ankle",    "right_ankle"};

}  // namespace

bool BBox::valid() const noexcept {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
         w >= 0.0 && h >= 0.0;
}

std::string_view joint_name(Joint joint) noexcept {
  return kJointNames[static_cast<std::size_t>(joint)];
}

PoseKeypoints::PoseKeypoints(std::span<const Keypoint> points) {
  if (points.size() != kKeypointCount) {
    throw std::invalid_argument("pose must have exactly 17 keypoints, got " +
                                std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < kKeypointCount; ++i) {
    points_[i] = points[i].visible ? points[i] : Keypoint{};
  }
}

std::size_t PoseKeypoints::visible_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(points_.begin(), points_.end(), [](const Keypoint& k) { return k.visible; }));
}

std::string_view to_string(Label label) noexcept {
  return label == Label::Foul ? "FOUL" : "NON_FOUL";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  if (iequals(text, "FOUL")) return Label::Foul;
  if (iequals(text, "NON_FOUL")) return Label::NonFoul;
  return std::nullopt;
}

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::NoBall: return "NO_BALL";
    case RejectReason::InsufficientContext: return "INSUFFICIENT_CONTEXT";
    case RejectReason::ExcludedLabel: return "EXCLUDED_LABEL";
    case RejectReason::TooFewPlayers: return "TOO_FEW_PLAYERS";
    case RejectReason::LostTrack: return "LOST_TRACK";
  }
  return "UNKNOWN";
}

std::optional<RejectReason> parse_reject_reason(std::string_view text) noexcept {
  for (auto r : {RejectReason::NoBall, RejectReason::InsufficientContext,
                 RejectReason::ExcludedLabel, RejectReason::TooFewPlayers,
                 RejectReason::LostTrack}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

const PlayerDetection* FrameAnnotation::find_player(int player_ref) const noexcept {
  auto it = std::find_if(players.begin(), players.end(),
                         [&](const PlayerDetection& p) { return p.player_ref == player_ref; });
  return it == players.end() ? nullptr : &*it;
}

const FrameAnnotation* MatchAnnotation::find_frame(int index) const noexcept {
  auto it = std::lower_bound(frames.begin(), frames.end(), index,
                             [](const FrameAnnotation& f, int i) { return f.index < i; });
  if (it == frames.end() || it->index != index) return nullptr;
  return &*it;
}

int MatchAnnotation::frame_at_second(double seconds) const noexcept {
  return static_cast<int>(std::llround(seconds * fps));
}

Point bbox_center(const BBox& b) noexcept { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

Point foot_position(const BBox& b, double frame_w, double frame_h) {
  if (!(frame_w > 0.0) || !(frame_h > 0.0)) {
    throw std::invalid_argument("foot_position: frame dimensions must be positive");
  }
  return {(b.x + b.w / 2.0) / frame_w, (b.y + b.h) / frame_h};
}

double euclidean(const Point& a, const Point& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace futurefoul
