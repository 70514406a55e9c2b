// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/study.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <chrono>

#include "config_json.hpp"
#include "futurefoul/annotation.hpp"
#include "futurefoul/checkpoint.hpp"
#include "futurefoul/error.hpp"
#include "futurefoul/hash.hpp"
#include "futurefoul/synth.hpp"

namespace futurefoul {

std::string_view to_string(StudyAxis axis) noexcept {
  switch (axis) {
    case StudyAxis::Ablation: return "ablation";
    case StudyAxis::Frames: return "frames";
    case StudyAxis::Size: return "size";
  }
  return "ablation";
}

std::optional<StudyAxis> parse_study_axis(std::string_view text) noexcept {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto a : {StudyAxis::Ablation, StudyAxis::Frames, StudyAxis::Size}) {
    if (to_string(a) == lower) return a;
  }
  return std::nullopt;
}

std::vector<StudyVariant> default_variants(StudyAxis axis, const FeatureConfig& base) {
  std::vector<StudyVariant> out;
  switch (axis) {
    case StudyAxis::Ablation:
      out.push_back({"FutureFoul", ModelConfig::full(), base});
      out.push_back({"CNN+GRU w/ video+bbox+pose", ModelConfig::video_bbox_pose(), base});
      out.push_back({"CNN+GRU w/ video+bbox", ModelConfig::video_bbox(), base});
      out.push_back({"CNN+GRU w/ video", ModelConfig::video_gru(), base});
      out.push_back({"CNN w/ video", ModelConfig::cnn_video(), base});
      break;
    case StudyAxis::Frames:
      for (int n : {4, 45, 35, 25, 15, 8}) {
        FeatureConfig f = base;
        f.n_frames = n;
        out.push_back({fmt::format("FutureFoul ({} frames)", n), ModelConfig::full(), f});
      }
      break;
    case StudyAxis::Size:
      for (int s : {64, 128, 256}) {
        FeatureConfig f = base;
        f.global_size = s;
        out.push_back({fmt::format("FutureFoul ({}x{})", s, s), ModelConfig::full(), f});
      }
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// StudyData

void StudyData::add_match(std::shared_ptr<const MatchAnnotation> match, std::shared_ptr<const FrameSource> frames,
                          const BuildOptions& options) {
  auto batch = build_tracksets(*match, options);
  for (auto& ts : batch.tracksets) events_.push_back({std::move(ts), frames});
  rejections_.insert(rejections_.end(), batch.rejections.begin(), batch.rejections.end());
  matches_.push_back(std::move(match));
}

std::vector<Label> StudyData::labels() const {
  std::vector<Label> out;
  for (const auto& e : events_) out.push_back(e.trackset.label);
  return out;
}

std::vector<std::string> StudyData::names() const {
  std::vector<std::string> out;
  for (const auto& e : events_) out.push_back(e.trackset.match_id + "_t" + std::to_string(e.trackset.time_s));
  return out;
}

std::vector<Sample> StudyData::build(const FeatureConfig& features) const {
  std::vector<Sample> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(build_sample(e.trackset, *e.frames, features));
  return out;
}

StudyData study_data_from_matches(std::vector<MatchAnnotation> matches, const BuildOptions& options) {
  StudyData data;
  for (auto& m : matches) {
    auto match = std::make_shared<const MatchAnnotation>(std::move(m));
    auto frames = std::make_shared<const RenderedFrameSource>(*match);
    data.add_match(match, frames, options);
  }
  return data;
}

StudyData study_data_from_directory(const std::filesystem::path& dataset_dir, const BuildOptions& options) {
  StudyData data;
  for (const auto& m : read_dataset_index(dataset_dir)) {
    auto match = std::make_shared<const MatchAnnotation>(parse_match(m.annotation));
    data.add_match(match, std::make_shared<const DirectoryFrameSource>(m.frames), options);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Reports

std::string split_hash(const std::vector<std::string>& names, const std::vector<std::size_t>& indices) {
  std::string joined;
  for (auto i : indices) {
    joined += names.at(i);
    joined += '\n';
  }
  return sha1_hex(joined);
}

std::string StudyReport::csv() const {
  std::string out = "variant,acc,prec,rec,tp,fp,tn,fn,best_epoch,status\n";
  for (const auto& r : rows) {
    std::string name = r.name;
    if (name.find(',') != std::string::npos || name.find('"') != std::string::npos) {
      std::string quoted = "\"";
      for (char c : name) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      name = quoted + "\"";
    }
    if (r.failed) {
      out += fmt::format("{},,,,,,,,,failed\n", name);
      continue;
    }
    const auto& m = r.metrics;
    out += fmt::format("{},{:.1f},{:.1f},{:.1f},{},{},{},{},{},ok\n", name, m.accuracy, m.precision, m.recall,
                       m.confusion.tp, m.confusion.fp, m.confusion.tn, m.confusion.fn, r.best_epoch);
  }
  return out;
}

std::string StudyReport::table() const {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out = fmt::format("{:<{}}  {:>7}  {:>8}  {:>7}\n", "Model", width, "Acc (%)", "Prec (%)", "Rec (%)");
  out += std::string(width + 30, '-') + "\n";
  for (const auto& r : rows) {
    if (r.failed) {
      out += fmt::format("{:<{}}  failed: {}\n", r.name, width, r.error);
      continue;
    }
    const auto& m = r.metrics;
    out += fmt::format("{:<{}}  {:>7.1f}  {:>8.1f}  {:>7.1f}{}\n", r.name, width, m.accuracy, m.precision, m.recall,
                       m.precision_undefined ? "  (precision undefined)" : "");
  }
  out += fmt::format("split hashes: train {} val {} test {}\n", split_hashes[0].substr(0, 12),
                     split_hashes[1].substr(0, 12), split_hashes[2].substr(0, 12));
  return out;
}

std::string StudyReport::json() const {
  nlohmann::ordered_json j;
  j["axis"] = std::string(to_string(axis));
  j["train"] = to_json(train);
  j["split_sizes"] = split_sizes;
  j["split_seed"] = split_seed;
  j["split_hashes"] = split_hashes;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    row["model"] = to_json(r.model);
    row["features"] = to_json(r.features);
    row["failed"] = r.failed;
    row["error"] = r.error;
    row["metrics"] = nlohmann::ordered_json::parse(metrics_json(r.metrics));
    row["best_epoch"] = r.best_epoch;
    row["best_val_accuracy"] = r.best_val_accuracy;
    row["parameters"] = r.parameters;
    row["train_seconds"] = r.train_seconds;
    row["checkpoint"] = r.checkpoint;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

StudyReport StudyReport::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    StudyReport r;
    const auto axis = parse_study_axis(j.at("axis").get<std::string>());
    if (!axis) throw Error("unknown study axis");
    r.axis = *axis;
    r.train = train_config_from_json(j.at("train"));
    r.split_sizes = j.at("split_sizes").get<std::array<std::size_t, 3>>();
    r.split_seed = j.at("split_seed").get<std::uint64_t>();
    r.split_hashes = j.at("split_hashes").get<std::array<std::string, 3>>();
    for (const auto& row : j.at("rows")) {
      StudyRow s;
      s.name = row.at("name").get<std::string>();
      s.model = model_config_from_json(row.at("model"));
      s.features = feature_config_from_json(row.at("features"));
      s.failed = row.at("failed").get<bool>();
      s.error = row.at("error").get<std::string>();
      s.metrics = parse_metrics_json(row.at("metrics").dump());
      s.best_epoch = row.at("best_epoch").get<int>();
      s.best_val_accuracy = row.at("best_val_accuracy").get<double>();
      s.parameters = row.at("parameters").get<std::size_t>();
      s.train_seconds = row.at("train_seconds").get<double>();
      s.checkpoint = row.at("checkpoint").get<std::string>();
      r.rows.push_back(std::move(s));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad study report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// run_study

namespace {

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) != 0) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::vector<const Sample*> pick(const std::vector<Sample>& samples, const std::vector<std::size_t>& idx) {
  std::vector<const Sample*> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(&samples[i]);
  return out;
}

}  // namespace

StudyReport run_study(const StudySpec& spec, const StudyData& data, const std::optional<std::filesystem::path>& out_dir,
                      const StudyProgress& progress) {
  spec.train.validate();
  if (spec.variants.empty()) throw ConfigError("study has no variants");
  const DatasetSplit split = split_dataset(data.size(), spec.split_sizes, spec.split_seed);
  if (split.train.empty() || split.val.empty() || split.test.empty()) {
    throw ConfigError("every split part must hold at least one sample");
  }

  StudyReport report;
  report.axis = spec.axis;
  report.train = spec.train;
  report.split_sizes = spec.split_sizes;
  report.split_seed = spec.split_seed;
  const auto names = data.names();
  report.split_hashes = {split_hash(names, split.train), split_hash(names, split.val), split_hash(names, split.test)};
  if (out_dir) std::filesystem::create_directories(*out_dir / "checkpoints");

  bool cached = false;
  FeatureConfig cached_config;
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < spec.variants.size(); ++k) {
    const auto& v = spec.variants[k];
    StudyRow row;
    row.name = v.name;
    row.model = v.model;
    row.features = v.features;
    try {
      if (!cached || !(cached_config == v.features)) {
        samples.clear();
        cached = false;
        samples = data.build(v.features);
        cached_config = v.features;
        cached = true;
      }
      const auto train_set = pick(samples, split.train);
      const auto val_set = pick(samples, split.val);
      const auto test_set = pick(samples, split.test);
      FutureFoulNet<float> model(v.model, v.features, spec.train.seed);
      row.parameters = model.parameter_count();
      const auto start = std::chrono::steady_clock::now();
      const auto outcome = train(model, train_set, val_set, spec.train, [&](const EpochRecord& rec) {
        if (progress) progress(v.name, rec);
      });
      row.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.best_epoch = outcome.best_epoch;
      row.best_val_accuracy = outcome.best_val_accuracy;
      row.metrics = evaluate(model, test_set, spec.train.batch_size).metrics;
      if (out_dir) {
        row.checkpoint = fmt::format("checkpoints/{}_{}.ckpt", k, slug(v.name));
        save_checkpoint(*out_dir / row.checkpoint, model, spec.train.seed);
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace futurefoul
