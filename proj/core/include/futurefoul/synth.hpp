// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "futurefoul/features.hpp"
#include "futurefoul/image.hpp"
#include "futurefoul/types.hpp"

namespace futurefoul {

// Synthetic matches. Event i sits at second 4 + 5i; only the frames from the
// window start up to the anchor frame are annotated. Players 0 and 1 stand
// 65-80 px from the ball, players 2..4 95-120 px, all at least 92 px apart;
// the rest stay at least 190 px from the ball, so the anchor selection always
// picks players 0..4 with 0 and 1 first.
//
// FOUL: players 0 and 1 converge during the last 15 input frames until their
// centres are 8-18 px apart, while both swing their legs
// (ankles move 2A = 48 * signal_strength px between consecutive frames).
// NON_FOUL: nobody converges; keypoints jitter by at most 1 px.
// Either class may carry a decoy: two far players converge without swinging.

namespace synth {
inline constexpr double kOverlapThreshold = 20.0;  // px, bbox centres
inline constexpr double kSwingThreshold = 16.0;    // px, ankle displacement per frame
inline constexpr double kSeparationFloor = 80.0;   // px, NON_FOUL pairs among the near five
inline constexpr int kSignalFrames = 15;
inline constexpr int kEventSpacingS = 5;
inline constexpr int kFirstEventS = 4;
}  // namespace synth

struct GapInjection {
  int player_ref = 0;
  int length = 0;  // frames
};

struct SynthConfig {
  std::string match_id = "synth";
  int n_events = 10;
  double foul_fraction = 0.5;
  int width = 640;
  int height = 360;
  double fps = 25.0;
  int players_per_frame = 8;
  double signal_strength = 0.8;
  /// Removes the player from window frames 20 .. 20 + length - 1 of every event.
  std::optional<GapInjection> gap;
  /// Every k-th event (1-based) has no ball at its anchor frame; 0 disables.
  int ball_missing_every = 0;
  double decoy_probability = 0.5;
  std::uint64_t seed = 0;

  /// Throws ConfigError; a non-positive signal_strength is refused because
  /// the labels would be noise.
  void validate() const;
};

MatchAnnotation generate_match(const SynthConfig& config);

/// Re-derives the label from geometry alone: the five players nearest the
/// ball at the anchor frame, and a pair of them closer than the overlap
/// threshold in a signal-window frame where either one's ankle moved more
/// than the swing threshold. nullopt when the anchor frame has no ball, fewer
/// than five players, or the event has no full window.
std::optional<Label> oracle_label(const MatchAnnotation& match, const EventAnnotation& event);

/// The two statistics oracle_label thresholds: the smallest near-pair centre
/// distance and the largest ankle displacement of that frame's pair, taken
/// over the signal window.
struct OracleStats {
  double min_pair_distance = 0.0;
  double max_pair_swing = 0.0;
};
std::optional<OracleStats> oracle_stats(const MatchAnnotation& match, const EventAnnotation& event);

/// Fixed colour for a player ref, shared by frame rendering and overlays.
Rgb player_color(int player_ref) noexcept;

/// Green field, one filled rectangle per player, white ball disc. A pure
/// function of the annotation.
Image render_frame(const MatchAnnotation& match, const FrameAnnotation& frame);

/// Renders frames on demand; frames without an annotation are missing.
class RenderedFrameSource final : public FrameSource {
 public:
  explicit RenderedFrameSource(const MatchAnnotation& match) : match_(match) {}
  Image frame(int index) const override;

 private:
  const MatchAnnotation& match_;
};

/// Splits config.n_events into matches of at most `events_per_match` events
/// with derived seeds and ids "<match_id>_<k>" with k zero-padded to three digits.
std::vector<SynthConfig> plan_matches(const SynthConfig& config, int events_per_match);

// Dataset layout:
//   <dir>/dataset.json                     match list
//   <dir>/<match_id>/annotation.json
//   <dir>/<match_id>/frames/<index:06>.png
struct DatasetMatch {
  std::string match_id;
  std::filesystem::path annotation;
  std::filesystem::path frames;
};

void write_synthetic_match(const std::filesystem::path& dataset_dir, const MatchAnnotation& match);
void write_dataset_index(const std::filesystem::path& dataset_dir, const std::vector<std::string>& match_ids);
std::vector<DatasetMatch> read_dataset_index(const std::filesystem::path& dataset_dir);

}  // namespace futurefoul
