// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "futurefoul/dataset.hpp"
#include "futurefoul/features.hpp"
#include "futurefoul/model.hpp"
#include "futurefoul/trainer.hpp"

namespace futurefoul {

enum class StudyAxis { Ablation, Frames, Size };

std::string_view to_string(StudyAxis axis) noexcept;
/// "ablation", "frames" or "size" (case-insensitive).
std::optional<StudyAxis> parse_study_axis(std::string_view text) noexcept;

struct StudyVariant {
  std::string name;
  ModelConfig model;
  FeatureConfig features;
};

struct StudySpec {
  StudyAxis axis = StudyAxis::Ablation;
  std::vector<StudyVariant> variants;  // report order
  TrainConfig train;
  std::array<std::size_t, 3> split_sizes{};
  std::uint64_t split_seed = 0;
};

/// The standard variants of an axis, derived from `base` features:
///   ABLATION  full model, then video+bbox+pose, video+bbox, video GRU, CNN video
///   FRAMES    full model at 4, 45, 35, 25, 15 and 8 frames
///   SIZE      full model at global sizes 64, 128 and 256
std::vector<StudyVariant> default_variants(StudyAxis axis, const FeatureConfig& base);

/// Selected tracks and a frame source per event; samples are rebuilt for
/// each feature config a study needs.
class StudyData {
 public:
  void add_match(std::shared_ptr<const MatchAnnotation> match, std::shared_ptr<const FrameSource> frames,
                 const BuildOptions& options = {});

  std::size_t size() const noexcept { return events_.size(); }
  const std::vector<Rejection>& rejections() const noexcept { return rejections_; }
  std::vector<Label> labels() const;
  std::vector<std::string> names() const;  // sample names, event order

  std::vector<Sample> build(const FeatureConfig& features) const;

 private:
  struct Event {
    TrackSet trackset;
    std::shared_ptr<const FrameSource> frames;
  };
  std::vector<std::shared_ptr<const MatchAnnotation>> matches_;
  std::vector<Event> events_;
  std::vector<Rejection> rejections_;
};

/// Synthetic matches rendered in memory.
StudyData study_data_from_matches(std::vector<MatchAnnotation> matches, const BuildOptions& options = {});
/// A dataset directory (see synth.hpp) with frames read from disk.
StudyData study_data_from_directory(const std::filesystem::path& dataset_dir, const BuildOptions& options = {});

struct StudyRow {
  std::string name;
  ModelConfig model;
  FeatureConfig features;
  bool failed = false;
  std::string error;
  Metrics metrics;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::size_t parameters = 0;
  double train_seconds = 0.0;
  std::string checkpoint;  // relative to the study directory, empty when not kept
};

struct StudyReport {
  StudyAxis axis = StudyAxis::Ablation;
  TrainConfig train;
  std::array<std::size_t, 3> split_sizes{};
  std::uint64_t split_seed = 0;
  /// SHA-1 of the newline-joined sample names of each split part.
  std::array<std::string, 3> split_hashes;
  std::vector<StudyRow> rows;

  /// variant,acc,prec,rec,tp,fp,tn,fn,best_epoch,status
  std::string csv() const;
  /// Model | Acc (%) | Prec (%) | Rec (%)
  std::string table() const;
  std::string json() const;
  static StudyReport from_json(const std::string& text);
};

/// SHA-1 of the names joined with newlines.
std::string split_hash(const std::vector<std::string>& names, const std::vector<std::size_t>& indices);

using StudyProgress = std::function<void(const std::string& variant, const EpochRecord& record)>;

/// Trains every variant on one shared split and seed and evaluates it on the
/// test part. With `out_dir` set, checkpoints go to
/// `<out_dir>/checkpoints/<k>_<slug>.ckpt`. A variant that throws is
/// recorded as failed and the study continues.
StudyReport run_study(const StudySpec& spec, const StudyData& data,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                      const StudyProgress& progress = {});

}  // namespace futurefoul
