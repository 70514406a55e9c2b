// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "futurefoul/annotation.hpp"
#include "futurefoul/checkpoint.hpp"
#include "futurefoul/error.hpp"
#include "futurefoul/pipeline.hpp"
#include "futurefoul/qualitative.hpp"
#include "futurefoul/run_manifest.hpp"
#include "futurefoul/study.hpp"
#include "futurefoul/synth.hpp"
#include "futurefoul/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace futurefoul::cli {

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

void add_common(CLI::App* sub, Common& c, bool out_required) {
  sub->add_option("--config", c.config, "key=value settings file; flags take precedence");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  auto* out = sub->add_option("--out", c.out, "Output directory");
  if (out_required) out->required();
}

std::vector<std::pair<std::string, std::string>> config_echo(const CLI::App* sub) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream lines(sub->config_to_str(true, false));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || line[0] == '[' || eq == std::string::npos) continue;
    std::string value = line.substr(eq + 1);
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (line.compare(0, eq, "config") == 0) continue;
    pairs.emplace_back(line.substr(0, eq), value);
  }
  return pairs;
}

RunManifest start_manifest(const CLI::App* sub, const Common& c) {
  RunManifest m;
  m.command = sub->get_name();
  m.config = config_echo(sub);
  m.seed = c.seed;
  m.output = c.out;
  m.started_at = utc_timestamp();
  return m;
}

std::array<std::size_t, 3> split_sizes(const std::vector<std::size_t>& v) {
  if (v.size() != 3) throw UsageError("--split takes three sizes: train,val,test");
  return {v[0], v[1], v[2]};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
void as_usage(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

const std::map<std::string, ModelConfig (*)()> kModelPresets{
    {"full", &ModelConfig::full},
    {"video_bbox_pose", &ModelConfig::video_bbox_pose},
    {"video_bbox", &ModelConfig::video_bbox},
    {"video_gru", &ModelConfig::video_gru},
    {"cnn_video", &ModelConfig::cnn_video},
};

struct FeatureFlags {
  FeatureConfig features;
  double radius = 0.1;

  void add(CLI::App* sub) {
    sub->add_option("--frames", features.n_frames, "Subsampled frames per sample")->capture_default_str();
    sub->add_option("--size", features.global_size, "Global frame size S")->capture_default_str();
    sub->add_option("--crop", features.crop_size, "Player crop size C")->capture_default_str();
    sub->add_option("--radius", radius, "Tracking radius as a fraction of frame width")->capture_default_str();
  }
  BuildOptions options() const {
    if (!(radius > 0.0)) throw UsageError("--radius must be positive");
    BuildOptions o;
    o.radius_fraction = radius;
    return o;
  }
};

struct TrainFlags {
  TrainConfig train;

  void add(CLI::App* sub) {
    sub->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
    sub->add_option("--batch", train.batch_size, "Batch size")->capture_default_str();
    sub->add_option("--epochs", train.epochs, "Epochs")->capture_default_str();
  }
  TrainConfig config(std::uint64_t seed) const {
    TrainConfig t = train;
    t.seed = seed;
    as_usage([&] { t.validate(); });
    return t;
  }
};

// ---------------------------------------------------------------------------
// synth

struct SynthFlags {
  Common common;
  SynthConfig cfg;
  int events_per_match = 25;
  int gap_player = -1;
  int gap_length = 0;
};

int cmd_synth(const CLI::App* sub, SynthFlags& f, std::ostream& out) {
  SynthConfig cfg = f.cfg;
  cfg.seed = f.common.seed;
  if (f.gap_length > 0) {
    if (f.gap_player < 0) throw UsageError("--gap-length needs --gap-player");
    cfg.gap = GapInjection{f.gap_player, f.gap_length};
  }
  if (f.events_per_match < 1) throw UsageError("--events-per-match must be positive");
  as_usage([&] { cfg.validate(); });

  RunManifest manifest = start_manifest(sub, f.common);
  const fs::path dir = f.common.out;
  fs::create_directories(dir);
  std::vector<std::string> ids;
  std::size_t fouls = 0;
  for (const auto& plan : plan_matches(cfg, f.events_per_match)) {
    const MatchAnnotation match = generate_match(plan);
    for (const auto& e : match.events) fouls += classify_event(e.label_text) == EventClass::Foul ? 1 : 0;
    write_synthetic_match(dir, match);
    ids.push_back(match.match_id);
  }
  write_dataset_index(dir, ids);
  finalize_run_manifest(manifest);
  out << fmt::format("wrote {} matches, {} events ({} fouls) to {}\n", ids.size(), cfg.n_events, fouls, dir.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// build

struct BuildFlags {
  Common common;
  std::string data;
  FeatureFlags features;
  std::vector<std::size_t> split;
};

int cmd_build(const CLI::App* sub, BuildFlags& f, std::ostream& out) {
  const FeatureConfig features = f.features.features;
  as_usage([&] { features.validate(); });
  const BuildOptions options = f.features.options();
  std::optional<std::array<std::size_t, 3>> sizes;
  if (!f.split.empty()) sizes = split_sizes(f.split);

  RunManifest manifest = start_manifest(sub, f.common);
  manifest.inputs.emplace_back("dataset", f.data);

  std::vector<Sample> samples;
  std::vector<Rejection> rejections;
  std::size_t labelled = 0;
  for (const auto& m : read_dataset_index(f.data)) {
    const MatchAnnotation match = parse_match(m.annotation);
    auto built = build_match_samples(match, DirectoryFrameSource(m.frames), features, options);
    labelled += built.labelled_events;
    std::move(built.samples.begin(), built.samples.end(), std::back_inserter(samples));
    rejections.insert(rejections.end(), built.rejections.begin(), built.rejections.end());
  }

  std::vector<Split> splits;
  if (sizes) {
    const auto parts = split_dataset(samples.size(), *sizes, f.common.seed);
    splits.assign(samples.size(), Split::Unassigned);
    for (auto i : parts.train) splits[i] = Split::Train;
    for (auto i : parts.val) splits[i] = Split::Val;
    for (auto i : parts.test) splits[i] = Split::Test;
  }

  const fs::path dir = f.common.out;
  write_samples_dir(dir, samples, features, splits);
  write_rejection_log(dir / "rejections.txt", rejections);

  ordered_json summary;
  summary["samples"] = samples.size();
  summary["labelled_events"] = labelled;
  std::map<std::string, std::size_t> by_reason;
  for (const auto& r : rejections) ++by_reason[std::string(to_string(r.reason))];
  summary["rejections"] = by_reason;
  write_text(dir / "build_summary.json", summary.dump(2) + "\n");
  finalize_run_manifest(manifest);

  out << fmt::format("{} samples, {} rejections ({} labelled events) in {}\n", samples.size(), rejections.size(),
                     labelled, dir.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train / eval

struct NamedSplit {
  std::vector<std::string> train, val, test;
};

ordered_json split_json(const NamedSplit& s) {
  ordered_json j;
  j["train"] = s.train;
  j["val"] = s.val;
  j["test"] = s.test;
  return j;
}

NamedSplit read_split_json(const fs::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text(path));
    return {j.at("train").get<std::vector<std::string>>(), j.at("val").get<std::vector<std::string>>(),
            j.at("test").get<std::vector<std::string>>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

NamedSplit manifest_split(const SampleManifest& m) {
  NamedSplit s;
  for (const auto& e : m.entries) {
    switch (e.split) {
      case Split::Train: s.train.push_back(e.dir); break;
      case Split::Val: s.val.push_back(e.dir); break;
      case Split::Test: s.test.push_back(e.dir); break;
      case Split::Unassigned: break;
    }
  }
  return s;
}

std::vector<const Sample*> resolve(const LoadedSamples& loaded, const std::vector<std::string>& names) {
  std::map<std::string, const Sample*> by_name;
  for (std::size_t i = 0; i < loaded.samples.size(); ++i) by_name[loaded.manifest.entries[i].dir] = &loaded.samples[i];
  std::vector<const Sample*> out;
  for (const auto& n : names) {
    auto it = by_name.find(n);
    if (it == by_name.end()) throw Error("split names sample " + n + " which the samples directory lacks");
    out.push_back(it->second);
  }
  return out;
}

struct TrainCmdFlags {
  Common common;
  std::string samples;
  std::vector<std::size_t> split;
  std::string model = "full";
  TrainFlags train;
};

int cmd_train(const CLI::App* sub, TrainCmdFlags& f, std::ostream& out, std::ostream& err) {
  const TrainConfig tc = f.train.config(f.common.seed);
  const ModelConfig mc = kModelPresets.at(f.model)();
  std::optional<std::array<std::size_t, 3>> sizes;
  if (!f.split.empty()) sizes = split_sizes(f.split);

  RunManifest manifest = start_manifest(sub, f.common);
  manifest.inputs.emplace_back("samples", f.samples);
  const LoadedSamples loaded = load_samples_dir(f.samples);

  NamedSplit named;
  if (sizes) {
    const auto parts = split_dataset(loaded.samples.size(), *sizes, f.common.seed);
    for (auto i : parts.train) named.train.push_back(loaded.manifest.entries[i].dir);
    for (auto i : parts.val) named.val.push_back(loaded.manifest.entries[i].dir);
    for (auto i : parts.test) named.test.push_back(loaded.manifest.entries[i].dir);
  } else if (loaded.manifest.has_split()) {
    named = manifest_split(loaded.manifest);
  } else {
    throw UsageError("no split: pass --split or build the samples with --split");
  }
  const auto train_set = resolve(loaded, named.train);
  const auto val_set = resolve(loaded, named.val);
  if (train_set.empty() || val_set.empty()) throw Error("train and val parts must be non-empty");

  const fs::path dir = f.common.out;
  fs::create_directories(dir);
  write_text(dir / "split.json", split_json(named).dump(2) + "\n");

  FutureFoulNet<float> model(mc, loaded.manifest.config, f.common.seed);
  const auto outcome = train(model, train_set, val_set, tc, [&](const EpochRecord& r) {
    err << fmt::format("epoch {:>3}  train loss {:.4f} acc {:5.1f}  val loss {:.4f} acc {:5.1f}\n", r.epoch,
                       r.train_loss, r.train_acc, r.val_loss, r.val_acc);
  });
  outcome.history.write_csv(dir / "history.csv");
  save_checkpoint(dir / "model.ckpt", model, f.common.seed);
  const auto val = evaluate(model, val_set, tc.batch_size);
  write_text(dir / "val_metrics.json", metrics_json(val.metrics));
  finalize_run_manifest(manifest);

  out << fmt::format("best epoch {} (val acc {:.1f}%), checkpoint {}\n", outcome.best_epoch,
                     outcome.best_val_accuracy, (dir / "model.ckpt").string());
  return kExitOk;
}

struct EvalFlags {
  Common common;
  std::string checkpoint;
  std::string samples;
  std::string part = "test";
  std::string split_file;
  int qualitative = 0;
  int batch = 32;
};

int cmd_eval(const CLI::App* sub, EvalFlags& f, std::ostream& out) {
  if (f.batch < 1) throw UsageError("--batch must be positive");
  if (f.qualitative < 0) throw UsageError("--qualitative must be non-negative");

  RunManifest manifest = start_manifest(sub, f.common);
  manifest.inputs.emplace_back("checkpoint", f.checkpoint);
  manifest.inputs.emplace_back("samples", f.samples);

  CheckpointInfo info;
  FutureFoulNet<float> model = load_checkpoint(f.checkpoint, &info);
  const LoadedSamples loaded = load_samples_dir(f.samples);
  check_feature_compatibility(info, loaded.manifest.config);

  fs::path split_path = f.split_file.empty() ? fs::path(f.checkpoint).parent_path() / "split.json" : fs::path(f.split_file);
  NamedSplit named;
  if (fs::exists(split_path)) {
    named = read_split_json(split_path);
    manifest.inputs.emplace_back("split", split_path.string());
  } else if (loaded.manifest.has_split()) {
    named = manifest_split(loaded.manifest);
  } else {
    throw Error("no split manifest: expected " + split_path.string() + " or a split in the samples manifest");
  }
  const auto& names = f.part == "train" ? named.train : f.part == "val" ? named.val : named.test;
  const auto set = resolve(loaded, names);
  if (set.empty()) throw Error("the " + f.part + " part is empty");

  const Evaluation ev = evaluate(model, set, f.batch);
  const fs::path dir = f.common.out;
  fs::create_directories(dir);
  write_text(dir / "metrics.json", metrics_json(ev.metrics));
  write_text(dir / "metrics.txt", metrics_table(ev.metrics));
  std::string csv = "sample,label,predicted,foul_probability\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    csv += fmt::format("{},{},{},{:.6f}\n", set[i]->name(), to_string(set[i]->label), to_string(ev.predicted[i]),
                       ev.foul_probability[i]);
  }
  write_text(dir / "predictions.csv", csv);
  if (f.qualitative > 0) dump_qualitative(set, ev, dir / "qualitative", f.qualitative);
  finalize_run_manifest(manifest);

  out << metrics_table(ev.metrics);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ablate / report / predict

struct AblateFlags {
  Common common;
  std::string data;
  std::string axis = "ablation";
  std::vector<std::size_t> split;
  FeatureFlags features;
  TrainFlags train;
};

int cmd_ablate(const CLI::App* sub, AblateFlags& f, std::ostream& out, std::ostream& err) {
  const auto axis = parse_study_axis(f.axis);
  if (!axis) throw UsageError("--axis must be ablation, frames or size");
  const FeatureConfig base = f.features.features;
  as_usage([&] { base.validate(); });
  StudySpec spec;
  spec.axis = *axis;
  spec.variants = default_variants(*axis, base);
  spec.train = f.train.config(f.common.seed);
  spec.split_sizes = split_sizes(f.split);
  spec.split_seed = f.common.seed;

  RunManifest manifest = start_manifest(sub, f.common);
  manifest.inputs.emplace_back("dataset", f.data);
  const StudyData data = study_data_from_directory(f.data, f.features.options());
  const fs::path dir = f.common.out;
  const StudyReport report = run_study(spec, data, dir, [&](const std::string& variant, const EpochRecord& r) {
    err << fmt::format("{}: epoch {:>3}  train acc {:5.1f}  val acc {:5.1f}\n", variant, r.epoch, r.train_acc,
                       r.val_acc);
  });
  write_text(dir / "report.json", report.json());
  write_text(dir / "report.csv", report.csv());
  write_text(dir / "report.txt", report.table());
  finalize_run_manifest(manifest);

  out << report.table();
  for (const auto& row : report.rows) {
    if (row.failed) err << "variant " << row.name << " failed: " << row.error << "\n";
  }
  return kExitOk;
}

struct ReportFlags {
  Common common;
  std::vector<std::string> studies;
  std::string format = "table";
};

std::string axis_title(StudyAxis axis) {
  switch (axis) {
    case StudyAxis::Ablation: return "Model comparison";
    case StudyAxis::Frames: return "Number of input frames";
    case StudyAxis::Size: return "Input image size";
  }
  return "";
}

int cmd_report(const CLI::App* sub, ReportFlags& f, std::ostream& out) {
  if (f.format != "table" && f.format != "csv") throw UsageError("--format must be table or csv");
  RunManifest manifest = start_manifest(sub, f.common);
  std::string text;
  for (const auto& s : f.studies) {
    const fs::path path = fs::is_directory(s) ? fs::path(s) / "report.json" : fs::path(s);
    manifest.inputs.emplace_back("study", path.string());
    const StudyReport report = StudyReport::from_json(read_text(path));
    if (!text.empty()) text += "\n";
    if (f.format == "csv") {
      text += report.csv();
    } else {
      text += fmt::format("{} ({})\n\n", axis_title(report.axis), path.string());
      text += report.table();
    }
  }
  if (!f.common.out.empty()) {
    fs::create_directories(f.common.out);
    write_text(fs::path(f.common.out) / (f.format == "csv" ? "tables.csv" : "tables.txt"), text);
    finalize_run_manifest(manifest);
  }
  out << text;
  return kExitOk;
}

struct PredictFlags {
  Common common;
  std::string checkpoint;
  std::string sample;
};

int cmd_predict(const CLI::App* sub, PredictFlags& f, std::ostream& out) {
  RunManifest manifest = start_manifest(sub, f.common);
  manifest.inputs.emplace_back("checkpoint", f.checkpoint);
  manifest.inputs.emplace_back("sample", f.sample);
  CheckpointInfo info;
  FutureFoulNet<float> model = load_checkpoint(f.checkpoint, &info);
  const Sample sample = read_sample(f.sample);
  check_feature_compatibility(info, sample.config);
  const Sample* one[] = {&sample};
  const Evaluation ev = evaluate(model, one, 1);
  const std::string line = fmt::format("{:.6f} {}\n", ev.foul_probability[0], to_string(ev.predicted[0]));
  if (!f.common.out.empty()) {
    fs::create_directories(f.common.out);
    ordered_json j;
    j["sample"] = sample.name();
    j["foul_probability"] = ev.foul_probability[0];
    j["predicted"] = std::string(to_string(ev.predicted[0]));
    write_text(fs::path(f.common.out) / "prediction.json", j.dump(2) + "\n");
    finalize_run_manifest(manifest);
  }
  out << line;
  return kExitOk;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool flag_given(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Splices `key=value` lines from the subcommand's --config file in front of
// its flags, skipping keys that are also given as flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("{}:{}: expected key=value", path, line_no));
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") throw UsageError(fmt::format("{}:{}: config files do not nest", path, line_no));
    if (flag_given(args, key)) continue;
    extra.push_back("--" + key);
    extra.push_back(trim(line.substr(eq + 1)));
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"futurefoul: foul prediction from broadcast clips"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "futurefoul 0.1.0");

  SynthFlags synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(s_synth, synth.common, true);
  s_synth->add_option("--events", synth.cfg.n_events, "Number of events")->required();
  s_synth->add_option("--events-per-match", synth.events_per_match, "Events per match file")->capture_default_str();
  s_synth->add_option("--foul-fraction", synth.cfg.foul_fraction, "Share of FOUL events")->capture_default_str();
  s_synth->add_option("--width", synth.cfg.width, "Frame width")->capture_default_str();
  s_synth->add_option("--height", synth.cfg.height, "Frame height")->capture_default_str();
  s_synth->add_option("--fps", synth.cfg.fps, "Frames per second")->capture_default_str();
  s_synth->add_option("--players", synth.cfg.players_per_frame, "Players per frame")->capture_default_str();
  s_synth->add_option("--signal", synth.cfg.signal_strength, "Signal strength in (0, 1]")->capture_default_str();
  s_synth->add_option("--decoy", synth.cfg.decoy_probability, "Decoy pair probability")->capture_default_str();
  s_synth->add_option("--gap-player", synth.gap_player, "Player ref removed for --gap-length frames");
  s_synth->add_option("--gap-length", synth.gap_length, "Gap length in frames")->capture_default_str();
  s_synth->add_option("--ball-missing-every", synth.cfg.ball_missing_every, "Drop the ball on every k-th event")
      ->capture_default_str();
  s_synth->add_option("--match-id", synth.cfg.match_id, "Match id prefix")->capture_default_str();

  BuildFlags build;
  auto* s_build = app.add_subcommand("build", "Turn a dataset into samples");
  add_common(s_build, build.common, true);
  s_build->add_option("--data", build.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  build.features.add(s_build);
  s_build->add_option("--split", build.split, "Record a train,val,test split in the manifest")->delimiter(',');

  TrainCmdFlags trainf;
  auto* s_train = app.add_subcommand("train", "Train a model");
  add_common(s_train, trainf.common, true);
  s_train->add_option("--samples", trainf.samples, "Samples directory")->required()->check(CLI::ExistingDirectory);
  s_train->add_option("--split", trainf.split, "train,val,test sizes")->delimiter(',');
  std::vector<std::string> presets;
  for (const auto& [k, v] : kModelPresets) presets.push_back(k);
  s_train->add_option("--model", trainf.model, "Model variant")->check(CLI::IsMember(presets))->capture_default_str();
  trainf.train.add(s_train);

  EvalFlags evalf;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(s_eval, evalf.common, true);
  s_eval->add_option("--checkpoint", evalf.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--samples", evalf.samples, "Samples directory")->required()->check(CLI::ExistingDirectory);
  s_eval->add_option("--part", evalf.part, "Split part")->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  s_eval->add_option("--split-file", evalf.split_file, "split.json (default: beside the checkpoint)");
  s_eval->add_option("--qualitative", evalf.qualitative, "Cases per category to dump")->capture_default_str();
  s_eval->add_option("--batch", evalf.batch, "Batch size")->capture_default_str();

  AblateFlags ablate;
  auto* s_ablate = app.add_subcommand("ablate", "Run a study over one axis");
  add_common(s_ablate, ablate.common, true);
  s_ablate->add_option("--data", ablate.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  s_ablate->add_option("--axis", ablate.axis, "ablation, frames or size")->capture_default_str();
  s_ablate->add_option("--split", ablate.split, "train,val,test sizes")->required()->delimiter(',');
  ablate.features.add(s_ablate);
  ablate.train.add(s_ablate);

  PredictFlags predict;
  auto* s_predict = app.add_subcommand("predict", "Score one sample");
  add_common(s_predict, predict.common, false);
  s_predict->add_option("--checkpoint", predict.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  s_predict->add_option("--sample", predict.sample, "Sample directory")->required()->check(CLI::ExistingDirectory);

  ReportFlags report;
  auto* s_report = app.add_subcommand("report", "Render study tables");
  add_common(s_report, report.common, false);
  s_report->add_option("--study", report.studies, "Study directory or report.json")->required();
  s_report->add_option("--format", report.format, "table or csv")->capture_default_str();

  try {
    std::vector<std::string> full = args.empty() ? args : expand_config(args);
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (s_synth->parsed()) return cmd_synth(s_synth, synth, out);
    if (s_build->parsed()) return cmd_build(s_build, build, out);
    if (s_train->parsed()) return cmd_train(s_train, trainf, out, err);
    if (s_eval->parsed()) return cmd_eval(s_eval, evalf, out);
    if (s_ablate->parsed()) return cmd_ablate(s_ablate, ablate, out, err);
    if (s_predict->parsed()) return cmd_predict(s_predict, predict, out);
    if (s_report->parsed()) return cmd_report(s_report, report, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace futurefoul::cli
