// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "futurefoul/error.hpp"
#include "futurefoul/types.hpp"

namespace futurefoul {

enum class EventClass { Foul, NonFoul, Excluded };

std::string_view to_string(EventClass c) noexcept;

/// Event tags treated as fouls and as non-fouls. Matching is case-insensitive.
struct LabelSets {
  std::vector<std::string> foul{"Foul"};
  std::vector<std::string> non_foul{"Ball out of play", "Clearance", "Shots on target",
                                    "Shots off target", "Offside",   "Goal"};
};

EventClass classify_event(std::string_view label_text, const LabelSets& sets = {});

/// Reads and validates one annotation document.
///
/// Throws ParseError for syntax errors (with the line number) and for schema
/// violations (with the JSON path of the offending field). Throws
/// ValidationError, carrying the frame index, when a domain invariant fails:
/// duplicate frame indices, duplicate player refs within a frame, keypoint
/// arrays that are not 17 long, negative box sizes and so on. Frames are
/// returned sorted by index.
MatchAnnotation parse_match(const std::filesystem::path& path);
MatchAnnotation parse_match_text(std::string_view text);

/// Sorts frames and checks every invariant; used by both parse paths.
void validate_match(MatchAnnotation& match);

std::string serialize_match(const MatchAnnotation& match);
void write_match(const std::filesystem::path& path, const MatchAnnotation& match);

struct EligibleEvent {
  EventAnnotation event;
  Label label = Label::NonFoul;
};

struct Eligibility {
  std::vector<EligibleEvent> kept;
  /// Every dropped event, EXCLUDED_LABEL included.
  std::vector<Rejection> rejections;

  /// Rejections of events that were classified FOUL or NON_FOUL.
  std::size_t labelled_rejections() const noexcept;
};

/// Keeps labelled events with enough leading context and a ball at the anchor
/// frame. Checks run in the order label, context, ball.
Eligibility eligible_events(const MatchAnnotation& match, const LabelSets& sets = {},
                            double context_s = 3.0);

}  // namespace futurefoul
