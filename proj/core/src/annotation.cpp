// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

namespace futurefoul {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what, 0, path);
}

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing required field");
  return *it;
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

int read_int(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<int>(d);
  }
  schema_error(path, "expected an integer");
}

BBox read_bbox(const json& v, const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object with x, y, w, h");
  return BBox{read_number(member(v, "x", path), path + ".x"),
              read_number(member(v, "y", path), path + ".y"),
              read_number(member(v, "w", path), path + ".w"),
              read_number(member(v, "h", path), path + ".h")};
}

std::vector<Keypoint> read_keypoints(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of [x, y, visible]");
  std::vector<Keypoint> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& k = v[i];
    if (!k.is_array() || k.size() != 3) schema_error(p, "expected [x, y, visible]");
    Keypoint kp;
    kp.x = read_number(k[0], p + "[0]");
    kp.y = read_number(k[1], p + "[1]");
    if (k[2].is_boolean()) {
      kp.visible = k[2].get<bool>();
    } else if (k[2].is_number()) {
      kp.visible = k[2].get<double>() != 0.0;
    } else {
      schema_error(p + "[2]", "expected a boolean or 0/1");
    }
    out.push_back(kp);
  }
  return out;
}

int line_of_offset(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

MatchAnnotation from_json(const json& doc) {
  const std::string root = "$";
  if (!doc.is_object()) schema_error(root, "expected a top-level object");

  MatchAnnotation match;
  const json& id = member(doc, "match_id", root);
  if (!id.is_string()) schema_error("$.match_id", "expected a string");
  match.match_id = id.get<std::string>();
  match.fps = read_number(member(doc, "fps", root), "$.fps");
  match.width = read_int(member(doc, "width", root), "$.width");
  match.height = read_int(member(doc, "height", root), "$.height");

  const json& events = member(doc, "events", root);
  if (!events.is_array()) schema_error("$.events", "expected an array");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string p = "$.events[" + std::to_string(i) + "]";
    const json& label = member(events[i], "label", p);
    if (!label.is_string()) schema_error(p + ".label", "expected a string");
    match.events.push_back(
        EventAnnotation{label.get<std::string>(), read_int(member(events[i], "time_s", p), p + ".time_s")});
  }

  const json& frames = member(doc, "frames", root);
  if (!frames.is_array()) schema_error("$.frames", "expected an array");
  match.frames.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string p = "$.frames[" + std::to_string(i) + "]";
    const json& f = frames[i];
    FrameAnnotation frame;
    frame.index = read_int(member(f, "index", p), p + ".index");
    const json& ball = member(f, "ball", p);
    if (!ball.is_null()) frame.ball = read_bbox(ball, p + ".ball");
    const json& players = member(f, "players", p);
    if (!players.is_array()) schema_error(p + ".players", "expected an array");
    for (std::size_t j = 0; j < players.size(); ++j) {
      const std::string pp = p + ".players[" + std::to_string(j) + "]";
      PlayerDetection det;
      det.player_ref = read_int(member(players[j], "player_ref", pp), pp + ".player_ref");
      det.bbox = read_bbox(member(players[j], "bbox", pp), pp + ".bbox");
      const json& kps = member(players[j], "keypoints", pp);
      if (!kps.is_null()) {
        auto points = read_keypoints(kps, pp + ".keypoints");
        if (points.size() != kKeypointCount) {
          throw ValidationError("frame " + std::to_string(frame.index) + ", player " +
                                    std::to_string(det.player_ref) + ": expected 17 keypoints, got " +
                                    std::to_string(points.size()),
                                frame.index);
        }
        det.pose = PoseKeypoints(points);
      }
      frame.players.push_back(std::move(det));
    }
    match.frames.push_back(std::move(frame));
  }
  return match;
}

}  // namespace

std::string_view to_string(EventClass c) noexcept {
  switch (c) {
    case EventClass::Foul: return "FOUL";
    case EventClass::NonFoul: return "NON_FOUL";
    case EventClass::Excluded: return "EXCLUDED";
  }
  return "EXCLUDED";
}

EventClass classify_event(std::string_view label_text, const LabelSets& sets) {
  const std::string key = lower(label_text);
  for (const auto& tag : sets.foul) {
    if (lower(tag) == key) return EventClass::Foul;
  }
  for (const auto& tag : sets.non_foul) {
    if (lower(tag) == key) return EventClass::NonFoul;
  }
  return EventClass::Excluded;
}

void validate_match(MatchAnnotation& match) {
  if (!(match.fps > 0.0) || !std::isfinite(match.fps)) {
    throw ValidationError("fps must be positive", -1);
  }
  if (match.width <= 0 || match.height <= 0) {
    throw ValidationError("frame width and height must be positive", -1);
  }
  for (const auto& e : match.events) {
    if (e.time_s < 0) throw ValidationError("event '" + e.label_text + "' has negative time_s", -1);
  }
  std::stable_sort(match.frames.begin(), match.frames.end(),
                   [](const FrameAnnotation& a, const FrameAnnotation& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < match.frames.size(); ++i) {
    const FrameAnnotation& f = match.frames[i];
    const std::string where = "frame " + std::to_string(f.index);
    if (f.index < 0) throw ValidationError(where + ": negative frame index", f.index);
    if (i > 0 && match.frames[i - 1].index == f.index) {
      throw ValidationError(where + ": duplicate frame index", f.index);
    }
    if (f.ball && !f.ball->valid()) throw ValidationError(where + ": invalid ball bbox", f.index);
    std::set<int> refs;
    for (const auto& p : f.players) {
      if (!refs.insert(p.player_ref).second) {
        throw ValidationError(where + ": duplicate player_ref " + std::to_string(p.player_ref), f.index);
      }
      if (!p.bbox.valid()) {
        throw ValidationError(where + ": invalid bbox for player " + std::to_string(p.player_ref),
                              f.index);
      }
      if (p.pose) {
        for (const auto& k : *p.pose) {
          if (!std::isfinite(k.x) || !std::isfinite(k.y)) {
            throw ValidationError(where + ": non-finite keypoint", f.index);
          }
        }
      }
    }
  }
}

MatchAnnotation parse_match_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line, "");
  }
  MatchAnnotation match = from_json(doc);
  validate_match(match);
  return match;
}

MatchAnnotation parse_match(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open annotation file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_match_text(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line(), e.field());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what(), e.frame_index());
  }
}

std::string serialize_match(const MatchAnnotation& match) {
  auto bbox_json = [](const BBox& b) {
    ordered_json j;
    j["x"] = b.x;
    j["y"] = b.y;
    j["w"] = b.w;
    j["h"] = b.h;
    return j;
  };
  ordered_json doc;
  doc["match_id"] = match.match_id;
  doc["fps"] = match.fps;
  doc["width"] = match.width;
  doc["height"] = match.height;
  ordered_json events = ordered_json::array();
  for (const auto& e : match.events) {
    ordered_json je;
    je["label"] = e.label_text;
    je["time_s"] = e.time_s;
    events.push_back(std::move(je));
  }
  doc["events"] = std::move(events);
  ordered_json frames = ordered_json::array();
  for (const auto& f : match.frames) {
    ordered_json jf;
    jf["index"] = f.index;
    jf["ball"] = f.ball ? bbox_json(*f.ball) : ordered_json(nullptr);
    ordered_json players = ordered_json::array();
    for (const auto& p : f.players) {
      ordered_json jp;
      jp["player_ref"] = p.player_ref;
      jp["bbox"] = bbox_json(p.bbox);
      if (p.pose) {
        ordered_json kps = ordered_json::array();
        for (const auto& k : *p.pose) kps.push_back(ordered_json::array({k.x, k.y, k.visible ? 1 : 0}));
        jp["keypoints"] = std::move(kps);
      } else {
        jp["keypoints"] = nullptr;
      }
      players.push_back(std::move(jp));
    }
    jf["players"] = std::move(players);
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);
  return doc.dump() + "\n";
}

void write_match(const std::filesystem::path& path, const MatchAnnotation& match) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write annotation file " + path.string());
  out << serialize_match(match);
}

std::size_t Eligibility::labelled_rejections() const noexcept {
  return static_cast<std::size_t>(std::count_if(rejections.begin(), rejections.end(), [](const Rejection& r) {
    return r.reason != RejectReason::ExcludedLabel;
  }));
}

Eligibility eligible_events(const MatchAnnotation& match, const LabelSets& sets, double context_s) {
  Eligibility out;
  for (const auto& event : match.events) {
    const EventClass cls = classify_event(event.label_text, sets);
    if (cls == EventClass::Excluded) {
      out.rejections.push_back({match.match_id, event.time_s, RejectReason::ExcludedLabel});
      continue;
    }
    if (event.time_s < context_s) {
      out.rejections.push_back({match.match_id, event.time_s, RejectReason::InsufficientContext});
      continue;
    }
    const FrameAnnotation* anchor = match.find_frame(match.frame_at_second(event.time_s));
    if (anchor == nullptr || !anchor->ball) {
      out.rejections.push_back({match.match_id, event.time_s, RejectReason::NoBall});
      continue;
    }
    out.kept.push_back({event, cls == EventClass::Foul ? Label::Foul : Label::NonFoul});
  }
  return out;
}

}  // namespace futurefoul
