// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace futurefoul {

/// Number of players followed per sample.
inline constexpr std::size_t kTrackedPlayers = 5;
/// COCO-17 skeleton size.
inline constexpr std::size_t kKeypointCount = 17;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in pixel coordinates, (x, y) is the top-left corner.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  /// Non-negative size and finite coordinates.
  bool valid() const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// COCO-17 keypoint order.
enum class Joint : std::size_t {
  Nose = 0,
  LeftEye,
  RightEye,
  LeftEar,
  RightEar,
  LeftShoulder,
  RightShoulder,
  LeftElbow,
  RightElbow,
  LeftWrist,
  RightWrist,
  LeftHip,
  RightHip,
  LeftKnee,
  RightKnee,
  LeftAnkle,
  RightAnkle,
};

std::string_view joint_name(Joint joint) noexcept;

/// Limb pairs used when drawing skeletons.
inline constexpr std::array<std::pair<Joint, Joint>, 16> kSkeletonEdges{{
    {Joint::LeftAnkle, Joint::LeftKnee},
    {Joint::LeftKnee, Joint::LeftHip},
    {Joint::RightAnkle, Joint::RightKnee},
    {Joint::RightKnee, Joint::RightHip},
    {Joint::LeftHip, Joint::RightHip},
    {Joint::LeftShoulder, Joint::LeftHip},
    {Joint::RightShoulder, Joint::RightHip},
    {Joint::LeftShoulder, Joint::RightShoulder},
    {Joint::LeftShoulder, Joint::LeftElbow},
    {Joint::RightShoulder, Joint::RightElbow},
    {Joint::LeftElbow, Joint::LeftWrist},
    {Joint::RightElbow, Joint::RightWrist},
    {Joint::LeftEye, Joint::RightEye},
    {Joint::Nose, Joint::LeftEye},
    {Joint::Nose, Joint::RightEye},
    {Joint::LeftEye, Joint::LeftEar},
}};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  bool visible = false;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// Exactly 17 keypoints. Invisible points are stored as (0, 0).
class PoseKeypoints {
 public:
  /// All points invisible.
  PoseKeypoints() = default;
  /// Throws std::invalid_argument unless `points.size() == 17`.
  explicit PoseKeypoints(std::span<const Keypoint> points);

  const Keypoint& operator[](std::size_t i) const { return points_[i]; }
  const Keypoint& operator[](Joint j) const { return points_[static_cast<std::size_t>(j)]; }
  std::size_t size() const noexcept { return points_.size(); }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }
  std::size_t visible_count() const noexcept;

  friend bool operator==(const PoseKeypoints&, const PoseKeypoints&) = default;

 private:
  std::array<Keypoint, kKeypointCount> points_{};
};

enum class Label { NonFoul = 0, Foul = 1 };

std::string_view to_string(Label label) noexcept;
/// Accepts "FOUL" / "NON_FOUL" (case-insensitive).
std::optional<Label> parse_label(std::string_view text) noexcept;

struct PlayerDetection {
  int player_ref = 0;
  BBox bbox;
  std::optional<PoseKeypoints> pose;

  friend bool operator==(const PlayerDetection&, const PlayerDetection&) = default;
};

struct FrameAnnotation {
  int index = 0;
  std::optional<BBox> ball;
  std::vector<PlayerDetection> players;

  const PlayerDetection* find_player(int player_ref) const noexcept;

  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

struct EventAnnotation {
  std::string label_text;
  int time_s = 0;

  friend bool operator==(const EventAnnotation&, const EventAnnotation&) = default;
};

struct MatchAnnotation {
  std::string match_id;
  double fps = 25.0;
  int width = 0;
  int height = 0;
  std::vector<EventAnnotation> events;
  std::vector<FrameAnnotation> frames;  // sorted by index

  /// Binary search; nullptr when the frame carries no annotation.
  const FrameAnnotation* find_frame(int index) const noexcept;
  /// Frame index of a whole second, rounded to the nearest frame.
  int frame_at_second(double seconds) const noexcept;

  friend bool operator==(const MatchAnnotation&, const MatchAnnotation&) = default;
};

Point bbox_center(const BBox& b) noexcept;

/// Bottom centre of `b` divided by the frame size. Not clamped: boxes that
/// leave the frame produce coordinates outside [0, 1].
/// Throws std::invalid_argument for non-positive frame dimensions.
Point foot_position(const BBox& b, double frame_w, double frame_h);

double euclidean(const Point& a, const Point& b) noexcept;

}  // namespace futurefoul
