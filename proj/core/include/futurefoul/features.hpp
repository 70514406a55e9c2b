// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "futurefoul/dataset.hpp"
#include "futurefoul/image.hpp"
#include "futurefoul/types.hpp"

namespace futurefoul {

struct FeatureConfig {
  int n_frames = 4;
  int global_size = 64;  // video branch frame size
  int crop_size = 224;   // bbox image branch crop size

  /// Throws ConfigError unless n_frames >= 2 and both sizes are positive.
  void validate() const;
  /// True when n_frames and global_size lie on the reference study grid.
  bool in_reference_grid() const noexcept;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// `n` frame offsets spread over [0, total). (75, 4) gives {0, 24, 49, 74};
/// otherwise offsets are round(i * (total - 1) / (n - 1)).
/// Throws std::invalid_argument unless 2 <= n <= total.
std::vector<int> subsample_indices(int total, int n);

struct PlayerCrop {
  Image image;
  /// The box does not intersect the frame or has zero area; `image` is black.
  bool degenerate = false;
};

/// Crops the part of `bbox` inside the frame and resizes it to size x size.
PlayerCrop crop_player(const Image& frame, const BBox& bbox, int size);

/// Supplies full-resolution frames by absolute index.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// Throws MissingFrameError when the frame is unavailable.
  virtual Image frame(int index) const = 0;
};

/// Reads `<dir>/<index, zero-padded to 6 digits>.png`.
class DirectoryFrameSource final : public FrameSource {
 public:
  explicit DirectoryFrameSource(std::filesystem::path dir) : dir_(std::move(dir)) {}
  Image frame(int index) const override;

  static std::filesystem::path frame_path(const std::filesystem::path& dir, int index);

 private:
  std::filesystem::path dir_;
};

struct SampleMeta {
  std::string match_id;
  int time_s = 0;
  int frame_width = 0;
  int frame_height = 0;
  std::vector<int> frame_indices;  // absolute, one per subsampled frame
  std::vector<int> player_refs;    // channel order

  friend bool operator==(const SampleMeta&, const SampleMeta&) = default;
};

/// Model-ready record. Images are stored as bytes (value / 255); numeric
/// features are rounded to six decimals so that the text form on disk is
/// lossless.
struct Sample {
  FeatureConfig config;
  SampleMeta meta;
  Label label = Label::NonFoul;

  std::vector<std::uint8_t> video;   // n x 3 x S x S
  std::vector<double> feet;          // n x 5 x 2
  std::vector<double> poses;         // n x 5 x 17 x 2, zeros where invisible
  std::vector<std::uint8_t> crops;   // n x 5 x 3 x C x C
  std::vector<double> bboxes;        // n x 5 x 4, pixels (x, y, w, h)
  std::vector<std::uint8_t> held;    // n x 5
  std::vector<std::uint8_t> degenerate_crops;  // n x 5

  int n_frames() const noexcept { return config.n_frames; }
  std::size_t video_frame_size() const noexcept;
  std::size_t crop_image_size() const noexcept;
  std::string name() const;  // "<match_id>_t<time_s>"

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Rounds to six decimal places.
double round6(double v) noexcept;

/// Builds the four feature tensors at the subsampled frames of `trackset`.
/// Throws MissingFrameError naming the frame when an image is unavailable.
Sample build_sample(const TrackSet& trackset, const FrameSource& frames, const FeatureConfig& config);

}  // namespace futurefoul
