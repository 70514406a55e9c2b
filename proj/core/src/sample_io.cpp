// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/sample_io.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "futurefoul/error.hpp"
#include "json.hpp"

namespace futurefoul {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void write_rows(const std::filesystem::path& path, const std::string& header, const std::vector<double>& values,
                std::size_t per_row) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << header << "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_fixed6(values[i]) << ((i + 1) % per_row == 0 ? '\n' : ' ');
  }
}

std::vector<double> read_rows(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<double> values;
  values.reserve(expected);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const char* p = line.c_str();
    char* end = nullptr;
    while (true) {
      double v = std::strtod(p, &end);
      if (end == p) break;
      values.push_back(v);
      p = end;
    }
  }
  if (values.size() != expected) {
    throw Error(path.string() + ": expected " + std::to_string(expected) + " values, found " +
                std::to_string(values.size()));
  }
  return values;
}

ordered_json config_json(const FeatureConfig& c) {
  ordered_json j;
  j["n_frames"] = c.n_frames;
  j["global_size"] = c.global_size;
  j["crop_size"] = c.crop_size;
  return j;
}

FeatureConfig config_from_json(const json& j) {
  FeatureConfig c;
  c.n_frames = j.at("n_frames").get<int>();
  c.global_size = j.at("global_size").get<int>();
  c.crop_size = j.at("crop_size").get<int>();
  return c;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string format_fixed6(double v) { return fmt::format("{:.6f}", v); }

void write_sample(const std::filesystem::path& dir, const Sample& s) {
  std::filesystem::create_directories(dir);
  const int n = s.n_frames();
  const int S = s.config.global_size;
  const int C = s.config.crop_size;

  ordered_json meta;
  meta["match_id"] = s.meta.match_id;
  meta["time_s"] = s.meta.time_s;
  meta["label"] = std::string(to_string(s.label));
  meta["config"] = config_json(s.config);
  meta["frame_width"] = s.meta.frame_width;
  meta["frame_height"] = s.meta.frame_height;
  meta["frame_indices"] = s.meta.frame_indices;
  meta["player_refs"] = s.meta.player_refs;
  meta["held"] = s.held;
  meta["degenerate_crops"] = s.degenerate_crops;
  {
    std::ofstream out(dir / "meta.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << "\n";
  }
  write_rows(dir / "feet.txt", fmt::format("feet n_frames={} players=5 dims=2", n), s.feet, 2);
  write_rows(dir / "poses.txt", fmt::format("poses n_frames={} players=5 keypoints=17 dims=2", n), s.poses,
             kKeypointCount * 2);
  write_rows(dir / "bboxes.txt", fmt::format("bboxes n_frames={} players=5 dims=4", n), s.bboxes, 4);

  for (int t = 0; t < n; ++t) {
    write_png_planar(dir / fmt::format("global_{}.png", t), s.video.data() + t * s.video_frame_size(), S, S);
    for (std::size_t p = 0; p < kTrackedPlayers; ++p) {
      const std::size_t slot = static_cast<std::size_t>(t) * kTrackedPlayers + p;
      write_png_planar(dir / fmt::format("crop_{}_{}.png", t, p), s.crops.data() + slot * s.crop_image_size(), C,
                       C);
    }
  }
}

Sample read_sample(const std::filesystem::path& dir) {
  const json meta = read_json(dir / "meta.json");
  Sample s;
  try {
    s.config = config_from_json(meta.at("config"));
    s.meta.match_id = meta.at("match_id").get<std::string>();
    s.meta.time_s = meta.at("time_s").get<int>();
    s.meta.frame_width = meta.at("frame_width").get<int>();
    s.meta.frame_height = meta.at("frame_height").get<int>();
    s.meta.frame_indices = meta.at("frame_indices").get<std::vector<int>>();
    s.meta.player_refs = meta.at("player_refs").get<std::vector<int>>();
    s.held = meta.at("held").get<std::vector<std::uint8_t>>();
    s.degenerate_crops = meta.at("degenerate_crops").get<std::vector<std::uint8_t>>();
    auto label = parse_label(meta.at("label").get<std::string>());
    if (!label) throw Error("bad label");
    s.label = *label;
  } catch (const json::exception& e) {
    throw Error((dir / "meta.json").string() + ": " + e.what());
  }
  s.config.validate();
  const auto n = static_cast<std::size_t>(s.n_frames());
  s.feet = read_rows(dir / "feet.txt", n * kTrackedPlayers * 2);
  s.poses = read_rows(dir / "poses.txt", n * kTrackedPlayers * kKeypointCount * 2);
  s.bboxes = read_rows(dir / "bboxes.txt", n * kTrackedPlayers * 4);

  const int S = s.config.global_size;
  const int C = s.config.crop_size;
  s.video.reserve(n * s.video_frame_size());
  s.crops.reserve(n * kTrackedPlayers * s.crop_image_size());
  for (std::size_t t = 0; t < n; ++t) {
    auto g = read_png_planar(dir / fmt::format("global_{}.png", t), S, S);
    s.video.insert(s.video.end(), g.begin(), g.end());
    for (std::size_t p = 0; p < kTrackedPlayers; ++p) {
      auto c = read_png_planar(dir / fmt::format("crop_{}_{}.png", t, p), C, C);
      s.crops.insert(s.crops.end(), c.begin(), c.end());
    }
  }
  return s;
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unassigned: return "none";
  }
  return "none";
}

std::optional<Split> parse_split(std::string_view text) noexcept {
  for (auto s : {Split::Train, Split::Val, Split::Test, Split::Unassigned}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool SampleManifest::has_split() const noexcept {
  for (const auto& e : entries) {
    if (e.split != Split::Unassigned) return true;
  }
  return false;
}

void SampleManifest::save(const std::filesystem::path& path) const {
  ordered_json doc;
  doc["config"] = config_json(config);
  ordered_json list = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json j;
    j["dir"] = e.dir;
    j["match_id"] = e.match_id;
    j["time_s"] = e.time_s;
    j["label"] = std::string(to_string(e.label));
    j["split"] = std::string(to_string(e.split));
    list.push_back(std::move(j));
  }
  doc["samples"] = std::move(list);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

SampleManifest SampleManifest::load(const std::filesystem::path& path) {
  const json doc = read_json(path);
  SampleManifest m;
  try {
    m.config = config_from_json(doc.at("config"));
    for (const auto& j : doc.at("samples")) {
      ManifestEntry e;
      e.dir = j.at("dir").get<std::string>();
      e.match_id = j.at("match_id").get<std::string>();
      e.time_s = j.at("time_s").get<int>();
      auto label = parse_label(j.at("label").get<std::string>());
      auto split = parse_split(j.at("split").get<std::string>());
      if (!label || !split) throw Error(path.string() + ": bad label or split for " + e.dir);
      e.label = *label;
      e.split = *split;
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return m;
}

}  // namespace futurefoul
