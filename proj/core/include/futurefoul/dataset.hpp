// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "futurefoul/annotation.hpp"
#include "futurefoul/error.hpp"
#include "futurefoul/types.hpp"

namespace futurefoul {

/// Input frames [start_frame, start_frame + input_length) followed by the
/// prediction horizon. The anchor frame is the first horizon frame.
struct ClipWindow {
  int start_frame = 0;
  int input_length = 0;
  int horizon_length = 0;

  int input_end() const noexcept { return start_frame + input_length - 1; }
  int anchor_frame() const noexcept { return start_frame + input_length; }
  int horizon_end() const noexcept { return anchor_frame() + horizon_length - 1; }

  friend bool operator==(const ClipWindow&, const ClipWindow&) = default;
};

struct WindowSpec {
  double context_s = 3.0;
  double horizon_s = 1.0;
};

/// INSUFFICIENT_CONTEXT when the window would start before frame 0.
Result<ClipWindow> extract_window(const EventAnnotation& event, double fps, const WindowSpec& spec = {});

/// The `k` players closest to the ball (bbox centre to bbox centre), nearest
/// first, ties broken by the smaller player_ref.
/// NO_BALL without a ball box, TOO_FEW_PLAYERS with fewer than `k` players.
Result<std::vector<int>> select_anchor_players(const FrameAnnotation& frame,
                                               std::size_t k = kTrackedPlayers);

/// Greedy nearest-first association. Every (track, candidate) pair within
/// `radius` is visited in ascending distance order (ties: lower track index,
/// then lower candidate index); a pair is taken when neither side is claimed.
/// Returns, per track, the index of its candidate or nullopt.
std::vector<std::optional<std::size_t>> greedy_assign(std::span<const Point> tracks,
                                                      std::span<const Point> candidates,
                                                      double radius);

struct TrackEntry {
  int frame_index = 0;
  BBox bbox;
  PoseKeypoints pose;
  /// Carried over from the next frame because no candidate matched.
  bool held = false;
};

struct Track {
  int player_ref = 0;
  std::vector<TrackEntry> entries;  // chronological

  std::size_t held_count() const noexcept;
};

struct TrackSeed {
  int player_ref = 0;
  BBox bbox;
  PoseKeypoints pose;
};

/// Walks from the frame before the anchor back to `window.start_frame`,
/// associating each track with the nearest unclaimed box. Unmatched tracks
/// hold their last box and pose. Frames missing from the annotation count as
/// empty. Entries come back in chronological order, one per input frame.
std::vector<Track> backtrack(std::span<const TrackSeed> seeds, const MatchAnnotation& match,
                             const ClipWindow& window, double radius);

struct TrackSet {
  std::string match_id;
  int time_s = 0;
  int frame_width = 0;
  int frame_height = 0;
  ClipWindow window;
  std::vector<Track> players;  // anchor-selection order
  Label label = Label::NonFoul;
};

struct BuildOptions {
  WindowSpec window;
  std::size_t players = kTrackedPlayers;
  /// Matching radius as a fraction of the frame width.
  double radius_fraction = 0.1;
  /// A track held on more than this fraction of frames rejects the sample.
  double max_held_fraction = 0.5;
  LabelSets labels;
};

/// extract_window, select_anchor_players and backtrack in sequence.
Result<TrackSet> build_trackset(const MatchAnnotation& match, const EventAnnotation& event, Label label,
                                const BuildOptions& options = {});

struct TrackSetBatch {
  std::vector<TrackSet> tracksets;
  std::vector<Rejection> rejections;
  /// Events classified FOUL or NON_FOUL.
  std::size_t labelled_events = 0;
};

/// eligible_events followed by build_trackset for every kept event.
TrackSetBatch build_tracksets(const MatchAnnotation& match, const BuildOptions& options = {});

}  // namespace futurefoul
