// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "futurefoul/features.hpp"
#include "futurefoul/image.hpp"
#include "futurefoul/trainer.hpp"

namespace futurefoul {

enum class CaseCategory { TruePositive, TrueNegative, Missed, FalseAlarm };

inline constexpr std::array<CaseCategory, 4> kCaseCategories{CaseCategory::TruePositive, CaseCategory::TrueNegative,
                                                             CaseCategory::Missed, CaseCategory::FalseAlarm};

/// Directory name: true_positive, true_negative, missed, false_alarm.
std::string_view to_string(CaseCategory c) noexcept;
CaseCategory categorize(Label predicted, Label actual) noexcept;

/// Colour of player channel p in overlays.
Rgb channel_color(std::size_t channel) noexcept;

/// Overlay canvas width for one frame; the height keeps the source aspect.
inline constexpr int kOverlayWidth = 320;

/// The subsampled global frames upscaled to the canvas, side by side, with
/// each tracked player's box and skeleton drawn in its channel colour.
Image render_overlay(const Sample& sample);

struct QualitativeSummary {
  std::array<std::size_t, 4> available{};  // cases per category in the set
  std::array<std::size_t, 4> written{};
};

/// For each category writes up to `per_category` cases as
/// `<out>/<category>/<sample>.png` plus a `.json` sidecar (label, prediction,
/// probability, every drawn box in pixel and canvas coordinates), then
/// `<out>/summary.json` and `<out>/summary.txt` noting empty categories.
QualitativeSummary dump_qualitative(std::span<const Sample* const> samples, const Evaluation& evaluation,
                                    const std::filesystem::path& out, int per_category = 5);

}  // namespace futurefoul
