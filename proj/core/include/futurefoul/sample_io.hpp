// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "futurefoul/features.hpp"

namespace futurefoul {

// On-disk sample layout, one directory per sample:
//   meta.json            match id, time, label, feature config, frame indices,
//                        player refs, held and degenerate flags
//   feet.txt             one line per (frame, player): u v
//   poses.txt            one line per (frame, player): x0 y0 ... x16 y16
//   bboxes.txt           one line per (frame, player): x y w h (pixels)
//   global_<t>.png       subsampled frame t at S x S
//   crop_<t>_<p>.png     player p at frame t, C x C
// Numbers in the text files use six fixed decimals.

void write_sample(const std::filesystem::path& dir, const Sample& sample);
Sample read_sample(const std::filesystem::path& dir);

enum class Split { Train, Val, Test, Unassigned };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view text) noexcept;

struct ManifestEntry {
  std::string dir;  // relative to the manifest
  std::string match_id;
  int time_s = 0;
  Label label = Label::NonFoul;
  Split split = Split::Unassigned;
};

/// `manifest.json` in a samples directory.
struct SampleManifest {
  FeatureConfig config;
  std::vector<ManifestEntry> entries;

  bool has_split() const noexcept;
  void save(const std::filesystem::path& path) const;
  static SampleManifest load(const std::filesystem::path& path);
};

/// Fixed six-decimal text used by the numeric feature files.
std::string format_fixed6(double v);

}  // namespace futurefoul
