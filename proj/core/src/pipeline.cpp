// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "futurefoul/error.hpp"

namespace futurefoul {

std::size_t BuiltSamples::labelled_rejections() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rejections) n += r.reason == RejectReason::ExcludedLabel ? 0 : 1;
  return n;
}

BuiltSamples build_match_samples(const MatchAnnotation& match, const FrameSource& frames,
                                 const FeatureConfig& features, const BuildOptions& options) {
  features.validate();
  auto batch = build_tracksets(match, options);
  BuiltSamples out;
  out.rejections = std::move(batch.rejections);
  out.labelled_events = batch.labelled_events;
  out.samples.reserve(batch.tracksets.size());
  for (const auto& ts : batch.tracksets) out.samples.push_back(build_sample(ts, frames, features));
  return out;
}

void write_rejection_log(const std::filesystem::path& path, const std::vector<Rejection>& rejections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : rejections) out << r.match_id << ' ' << r.time_s << ' ' << to_string(r.reason) << '\n';
}

std::vector<Rejection> read_rejection_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<Rejection> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    // The match id may contain spaces; time and reason are the last fields.
    const auto bad = [&] { return Error(path.string() + ":" + std::to_string(line_no) + ": malformed rejection line"); };
    const auto cut2 = line.rfind(' ');
    const auto cut1 = cut2 == std::string::npos || cut2 == 0 ? std::string::npos : line.rfind(' ', cut2 - 1);
    if (cut1 == std::string::npos || cut1 == 0) throw bad();
    Rejection r;
    r.match_id = line.substr(0, cut1);
    const std::string time = line.substr(cut1 + 1, cut2 - cut1 - 1);
    const std::string reason = line.substr(cut2 + 1);
    const auto [end, ec] = std::from_chars(time.data(), time.data() + time.size(), r.time_s);
    if (ec != std::errc{} || end != time.data() + time.size()) throw bad();
    auto parsed = parse_reject_reason(reason);
    if (!parsed) throw Error(path.string() + ":" + std::to_string(line_no) + ": unknown reason " + reason);
    r.reason = *parsed;
    out.push_back(std::move(r));
  }
  return out;
}

void write_samples_dir(const std::filesystem::path& dir, const std::vector<Sample>& samples,
                       const FeatureConfig& features, const std::vector<Split>& splits) {
  if (!splits.empty() && splits.size() != samples.size()) {
    throw std::invalid_argument("write_samples_dir: one split per sample required");
  }
  std::filesystem::create_directories(dir);
  SampleManifest manifest;
  manifest.config = features;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (!(s.config == features)) throw ConfigError("sample " + s.name() + " was built with a different feature config");
    write_sample(dir / s.name(), s);
    manifest.entries.push_back(
        {s.name(), s.meta.match_id, s.meta.time_s, s.label, splits.empty() ? Split::Unassigned : splits[i]});
  }
  manifest.save(dir / "manifest.json");
}

LoadedSamples load_samples_dir(const std::filesystem::path& dir) {
  LoadedSamples out;
  out.manifest = SampleManifest::load(dir / "manifest.json");
  out.samples.reserve(out.manifest.entries.size());
  for (const auto& e : out.manifest.entries) {
    Sample s = read_sample(dir / e.dir);
    if (!(s.config == out.manifest.config)) {
      throw ConfigError("sample " + e.dir + " disagrees with the manifest feature config");
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace futurefoul
