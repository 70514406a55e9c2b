// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace futurefoul {

Result<ClipWindow> extract_window(const EventAnnotation& event, double fps, const WindowSpec& spec) {
  const auto anchor = static_cast<int>(std::llround(event.time_s * fps));
  const auto input = static_cast<int>(std::llround(spec.context_s * fps));
  const auto horizon = static_cast<int>(std::llround(spec.horizon_s * fps));
  if (anchor - input < 0) return RejectReason::InsufficientContext;
  return ClipWindow{anchor - input, input, horizon};
}

Result<std::vector<int>> select_anchor_players(const FrameAnnotation& frame, std::size_t k) {
  if (!frame.ball) return RejectReason::NoBall;
  if (frame.players.size() < k) return RejectReason::TooFewPlayers;

  const Point ball = bbox_center(*frame.ball);
  using Entry = std::pair<double, int>;  // (distance, player_ref); lexicographic order is the tie rule
  // Max-heap holding the k best seen so far.
  std::priority_queue<Entry> best;
  for (const auto& p : frame.players) {
    Entry e{euclidean(bbox_center(p.bbox), ball), p.player_ref};
    if (best.size() < k) {
      best.push(e);
    } else if (k > 0 && e < best.top()) {
      best.pop();
      best.push(e);
    }
  }
  std::vector<int> refs(best.size());
  for (auto it = refs.rbegin(); it != refs.rend(); ++it) {
    *it = best.top().second;
    best.pop();
  }
  return refs;
}

std::vector<std::optional<std::size_t>> greedy_assign(std::span<const Point> tracks,
                                                      std::span<const Point> candidates,
                                                      double radius) {
  using Pair = std::tuple<double, std::size_t, std::size_t>;  // (distance, track, candidate)
  std::priority_queue<Pair, std::vector<Pair>, std::greater<>> queue;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double d = euclidean(tracks[t], candidates[c]);
      if (d <= radius) queue.emplace(d, t, c);
    }
  }
  std::vector<std::optional<std::size_t>> assignment(tracks.size());
  std::vector<bool> claimed(candidates.size(), false);
  std::size_t remaining = std::min(tracks.size(), candidates.size());
  while (!queue.empty() && remaining > 0) {
    auto [d, t, c] = queue.top();
    queue.pop();
    if (assignment[t] || claimed[c]) continue;
    assignment[t] = c;
    claimed[c] = true;
    --remaining;
  }
  return assignment;
}

std::size_t Track::held_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const TrackEntry& e) { return e.held; }));
}

std::vector<Track> backtrack(std::span<const TrackSeed> seeds, const MatchAnnotation& match,
                             const ClipWindow& window, double radius) {
  std::vector<Track> tracks(seeds.size());
  std::vector<BBox> current_box(seeds.size());
  std::vector<PoseKeypoints> current_pose(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    tracks[i].player_ref = seeds[i].player_ref;
    tracks[i].entries.reserve(static_cast<std::size_t>(window.input_length));
    current_box[i] = seeds[i].bbox;
    current_pose[i] = seeds[i].pose;
  }

  std::vector<Point> track_centers(seeds.size());
  std::vector<Point> candidate_centers;
  for (int f = window.anchor_frame() - 1; f >= window.start_frame; --f) {
    const FrameAnnotation* frame = match.find_frame(f);
    candidate_centers.clear();
    if (frame != nullptr) {
      for (const auto& p : frame->players) candidate_centers.push_back(bbox_center(p.bbox));
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) track_centers[i] = bbox_center(current_box[i]);

    const auto assignment = greedy_assign(track_centers, candidate_centers, radius);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (assignment[i]) {
        const PlayerDetection& det = frame->players[*assignment[i]];
        current_box[i] = det.bbox;
        current_pose[i] = det.pose.value_or(PoseKeypoints{});
        tracks[i].entries.push_back({f, current_box[i], current_pose[i], false});
      } else {
        tracks[i].entries.push_back({f, current_box[i], current_pose[i], true});
      }
    }
  }
  for (auto& t : tracks) std::reverse(t.entries.begin(), t.entries.end());
  return tracks;
}

Result<TrackSet> build_trackset(const MatchAnnotation& match, const EventAnnotation& event, Label label,
                                const BuildOptions& options) {
  auto window = extract_window(event, match.fps, options.window);
  if (!window) return window.reason();

  const FrameAnnotation* anchor = match.find_frame(window.value().anchor_frame());
  if (anchor == nullptr || !anchor->ball) return RejectReason::NoBall;

  auto selected = select_anchor_players(*anchor, options.players);
  if (!selected) return selected.reason();

  std::vector<TrackSeed> seeds;
  seeds.reserve(selected.value().size());
  for (int ref : selected.value()) {
    const PlayerDetection* det = anchor->find_player(ref);
    seeds.push_back({ref, det->bbox, det->pose.value_or(PoseKeypoints{})});
  }

  TrackSet set;
  set.match_id = match.match_id;
  set.time_s = event.time_s;
  set.frame_width = match.width;
  set.frame_height = match.height;
  set.window = window.value();
  set.label = label;
  set.players = backtrack(seeds, match, set.window, options.radius_fraction * match.width);

  const double limit = options.max_held_fraction * set.window.input_length;
  for (const auto& t : set.players) {
    if (static_cast<double>(t.held_count()) > limit) return RejectReason::LostTrack;
  }
  return set;
}

TrackSetBatch build_tracksets(const MatchAnnotation& match, const BuildOptions& options) {
  TrackSetBatch out;
  Eligibility eligible = eligible_events(match, options.labels, options.window.context_s);
  out.labelled_events = eligible.kept.size() + eligible.labelled_rejections();
  out.rejections = std::move(eligible.rejections);
  for (const auto& e : eligible.kept) {
    auto ts = build_trackset(match, e.event, e.label, options);
    if (ts) {
      out.tracksets.push_back(std::move(ts).value());
    } else {
      out.rejections.push_back({match.match_id, e.event.time_s, ts.reason()});
    }
  }
  return out;
}

}  // namespace futurefoul
