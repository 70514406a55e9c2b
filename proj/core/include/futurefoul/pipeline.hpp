// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "futurefoul/dataset.hpp"
#include "futurefoul/features.hpp"
#include "futurefoul/sample_io.hpp"

namespace futurefoul {

struct BuiltSamples {
  std::vector<Sample> samples;
  /// Every dropped event, EXCLUDED_LABEL included.
  std::vector<Rejection> rejections;
  /// Events classified FOUL or NON_FOUL. Equals samples plus the rejections
  /// other than EXCLUDED_LABEL.
  std::size_t labelled_events = 0;

  std::size_t labelled_rejections() const noexcept;
};

/// eligible_events, build_trackset and build_sample for one match.
BuiltSamples build_match_samples(const MatchAnnotation& match, const FrameSource& frames,
                                 const FeatureConfig& features, const BuildOptions& options = {});

/// One line per rejection: "<match_id> <time_s> <REASON>".
void write_rejection_log(const std::filesystem::path& path, const std::vector<Rejection>& rejections);
std::vector<Rejection> read_rejection_log(const std::filesystem::path& path);

/// Writes each sample to `<dir>/<sample name>/` and `<dir>/manifest.json`.
/// `splits` is empty or holds one entry per sample.
void write_samples_dir(const std::filesystem::path& dir, const std::vector<Sample>& samples,
                       const FeatureConfig& features, const std::vector<Split>& splits = {});

struct LoadedSamples {
  SampleManifest manifest;
  std::vector<Sample> samples;  // manifest order
};

LoadedSamples load_samples_dir(const std::filesystem::path& dir);

}  // namespace futurefoul
