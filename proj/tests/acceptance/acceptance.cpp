// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "futurefoul/annotation.hpp"
#include "futurefoul/hash.hpp"
#include "futurefoul/nn/layers.hpp"
#include "futurefoul/pipeline.hpp"
#include "futurefoul/run_manifest.hpp"
#include "futurefoul/study.hpp"
#include "futurefoul/synth.hpp"
#include "futurefoul/trainer.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace ff = futurefoul;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(const std::string& line) {
  std::printf("    %s\n", line.c_str());
  std::fflush(stdout);
}

// 1 -------------------------------------------------------------------------

Outcome selection_oracle() {
  const auto start = Clock::now();
  ff::Rng rng(1001);
  int agree = 0;
  int selectable = 0;
  for (int i = 0; i < 200; ++i) {
    const auto frame = ff::oracle::random_frame(rng, static_cast<int>(rng.below(13)));
    const auto expect = ff::oracle::select(frame, ff::kTrackedPlayers);
    const auto got = ff::select_anchor_players(frame, ff::kTrackedPlayers);
    const bool same = expect ? got.ok() && got.value() == *expect : !got.ok();
    agree += same ? 1 : 0;
    selectable += expect ? 1 : 0;
  }
  const double t = seconds_since(start);
  return {agree == 200 && t < 5.0, fmt("%d/200 exact (%d with a selection), %.3f s", agree, selectable, t)};
}

// 2 -------------------------------------------------------------------------

Outcome backtracking_oracle() {
  const auto start = Clock::now();
  ff::Rng rng(2002);
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    const auto tracks = ff::oracle::random_points(rng, 1 + rng.below(8), 40);
    const auto cands = ff::oracle::random_points(rng, rng.below(12), 40);
    const double radius = 1.0 + static_cast<double>(rng.below(25));
    agree += ff::greedy_assign(tracks, cands, radius) == ff::oracle::assign(tracks, cands, radius) ? 1 : 0;
  }
  // Whole windows as well: backtrack against the frame-by-frame oracle.
  int windows = 0;
  int window_agree = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ff::SynthConfig c = ff::testing::small_synth(5, seed);
    c.gap = ff::GapInjection{static_cast<int>(seed), 6};
    const auto m = ff::generate_match(c);
    for (const auto& e : m.events) {
      const auto w = ff::extract_window(e, m.fps).value();
      const auto* anchor = m.find_frame(w.anchor_frame());
      std::vector<ff::TrackSeed> seeds;
      std::vector<ff::BBox> boxes;
      const auto refs = ff::select_anchor_players(*anchor).value();
      for (int r : refs) {
        seeds.push_back({r, anchor->find_player(r)->bbox, ff::PoseKeypoints{}});
        boxes.push_back(anchor->find_player(r)->bbox);
      }
      const double radius = 0.1 * m.width;
      const auto got = ff::backtrack(seeds, m, w, radius);
      const auto want = ff::oracle::backtrack(boxes, m, w.start_frame, w.input_end(), radius);
      bool same = got.size() == want.size();
      for (std::size_t p = 0; same && p < got.size(); ++p) {
        same = got[p].entries.size() == want[p].size();
        for (std::size_t t = 0; same && t < want[p].size(); ++t) {
          same = got[p].entries[t].bbox == want[p][t].bbox && got[p].entries[t].held == want[p][t].held;
        }
      }
      ++windows;
      window_agree += same ? 1 : 0;
    }
  }
  const double t = seconds_since(start);
  return {agree == 200 && window_agree == windows && t < 10.0,
          fmt("%d/200 assignments exact, %d/%d windows exact, %.3f s", agree, window_agree, windows, t)};
}

// 3 -------------------------------------------------------------------------

Outcome schema_round_trip() {
  ff::testing::TempDir dir("ffacc3");
  std::size_t validation_errors = 0;
  std::size_t eligible = 0;
  std::size_t logged = 0;
  std::size_t samples = 0;
  std::map<ff::RejectReason, std::size_t> reasons;
  const ff::FeatureConfig features = ff::testing::tiny_features(4, 16, 8);
  for (int k = 0; k < 100; ++k) {
    ff::SynthConfig c = ff::testing::small_synth(4, 3000 + static_cast<std::uint64_t>(k), "rt" + std::to_string(k));
    if (k % 5 == 1) c.ball_missing_every = 2;
    if (k % 5 == 2) c.gap = ff::GapInjection{2, 45};
    if (k % 5 == 3) c.players_per_frame = 4;
    ff::MatchAnnotation m = ff::generate_match(c);
    if (k % 5 == 4) {
      m.events.push_back({"Foul", 1});
      m.events.push_back({"Substitution", 9});
    }
    ff::MatchAnnotation parsed;
    try {
      ff::write_match(dir / "m.json", m);
      parsed = ff::parse_match(dir / "m.json");
    } catch (const ff::ValidationError&) {
      ++validation_errors;
      continue;
    }
    if (!(parsed == m)) ++validation_errors;
    for (const auto& e : parsed.events) eligible += ff::classify_event(e.label_text) != ff::EventClass::Excluded ? 1 : 0;
    const ff::RenderedFrameSource frames(parsed);
    const auto built = ff::build_match_samples(parsed, frames, features);
    ff::write_rejection_log(dir / "rejections.txt", built.rejections);
    for (const auto& r : ff::read_rejection_log(dir / "rejections.txt")) {
      ++reasons[r.reason];
      logged += r.reason != ff::RejectReason::ExcludedLabel ? 1 : 0;
    }
    samples += built.samples.size();
  }
  std::string mix;
  for (const auto& [reason, n] : reasons) mix += fmt(" %s=%zu", std::string(ff::to_string(reason)).c_str(), n);
  return {validation_errors == 0 && logged + samples == eligible && reasons.size() >= 4,
          fmt("%zu validation errors; %zu logged + %zu samples vs %zu eligible;", validation_errors, logged, samples,
              eligible) +
              mix};
}

// 4 -------------------------------------------------------------------------

Outcome shape_suite() {
  const auto start = Clock::now();
  const auto m = ff::generate_match(ff::testing::small_synth(2, 4004));
  const auto ts = ff::build_tracksets(m).tracksets;
  const ff::RenderedFrameSource frames(m);
  int ok = 0;
  std::string bad;
  for (int n : {4, 8, 15}) {
    for (int S : {64, 128}) {
      ff::FeatureConfig f;
      f.n_frames = n;
      f.global_size = S;
      f.crop_size = 64;
      std::vector<ff::Sample> samples;
      for (const auto& t : ts) samples.push_back(ff::build_sample(t, frames, f));
      const auto un = static_cast<std::size_t>(n);
      const auto uS = static_cast<std::size_t>(S);
      bool good = true;
      for (const auto& s : samples) {
        good = good && s.video.size() == un * 3 * uS * uS && s.feet.size() == un * 5 * 2 &&
               s.poses.size() == un * 5 * 17 * 2 && s.crops.size() == un * 5 * 3 * 64 * 64 &&
               s.bboxes.size() == un * 5 * 4;
      }
      const ff::ModelConfig model = ff::ModelConfig::full();
      ff::FutureFoulNet<float> net(model, f, 1);
      const auto batch = ff::make_batch<float>(ff::testing::pointers(samples), model);
      const int B = static_cast<int>(samples.size());
      good = good && batch.video.shape == std::vector<int>{B, n, 3, S, S} &&
             batch.feet.shape == std::vector<int>{B, n, 10} && batch.poses.shape == std::vector<int>{B, n, 170} &&
             batch.crops.shape == std::vector<int>{B, n, 5, 3, 64, 64};
      const auto logits = net.forward(batch, ff::Mode::Eval);
      good = good && logits.shape == std::vector<int>{B, 2} && net.fused_dim() == 4 * model.hidden;
      for (float v : logits.data) good = good && std::isfinite(v);
      if (good) {
        ++ok;
      } else {
        bad += fmt(" (n=%d,S=%d)", n, S);
      }
    }
  }
  const double t = seconds_since(start);
  return {ok == 6 && t < 120.0, fmt("%d/6 configurations exact, %.1f s", ok, t) + bad};
}

// 5 -------------------------------------------------------------------------

struct GradientReport {
  int checked = 0;
  int failed = 0;
  int kinked = 0;
  double worst = 0.0;
};

// A central difference is only an oracle when x - h and x + h sit on the same
// piece of every ReLU and max-pool; entries whose step crosses a kink are
// redrawn and counted.
GradientReport check_groups(const ff::ModelConfig& model, const ff::FeatureConfig& f,
                            const std::vector<ff::Sample>& samples, std::map<std::string, int>& per_group) {
  ff::FutureFoulNet<double> net(model, f, 55);
  const auto batch = ff::make_batch<double>(ff::testing::pointers(samples), model);
  auto loss = [&](std::uint64_t* pattern) {
    net.set_dropout_seed(99);
    const double l = ff::nn::cross_entropy<double>(net.forward(batch, ff::Mode::Train), batch.labels, nullptr);
    *pattern = net.activation_pattern();
    return l;
  };
  for (auto* p : net.parameters().params) p->zero_grad();
  net.set_dropout_seed(99);
  ff::nn::Tensor<double> grad;
  ff::nn::cross_entropy<double>(net.forward(batch, ff::Mode::Train), batch.labels, &grad);
  const std::uint64_t base = net.activation_pattern();
  net.backward(grad);

  GradientReport r;
  const double h = 1e-3;
  for (const char* group : ff::kParameterGroups) {
    for (auto* p : net.group(group).params) {
      int valid = 0;
      for (std::size_t k = 0; valid < 3 && k < 40; ++k) {
        const std::size_t i = (k * 7919 + 13) % p->value.size();
        const double keep = p->value.data[i];
        std::uint64_t up_pattern = 0;
        std::uint64_t down_pattern = 0;
        p->value.data[i] = keep + h;
        const double up = loss(&up_pattern);
        p->value.data[i] = keep - h;
        const double down = loss(&down_pattern);
        p->value.data[i] = keep;
        if (up_pattern != base || down_pattern != base) {
          ++r.kinked;
          continue;
        }
        const double numeric = (up - down) / (2 * h);
        const double err = ff::testing::relative_error(p->grad.data[i], numeric, 1e-6);
        r.worst = std::max(r.worst, err);
        r.failed += err < 1e-2 ? 0 : 1;
        ++r.checked;
        ++valid;
        ++per_group[group];
      }
    }
  }
  return r;
}

bool disabled_branches_invariant(const ff::FeatureConfig& f, const std::vector<ff::Sample>& base) {
  for (const ff::ModelConfig& preset : {ff::ModelConfig::video_bbox_pose(), ff::ModelConfig::video_bbox(),
                                        ff::ModelConfig::video_gru(), ff::ModelConfig::cnn_video()}) {
    const ff::ModelConfig m = ff::testing::tiny_model(preset);
    ff::FutureFoulNet<double> net(m, f, 66);
    std::vector<ff::Sample> samples = base;
    const auto before = net.forward(ff::make_batch<double>(ff::testing::pointers(samples), m), ff::Mode::Eval);
    for (auto& s : samples) {
      if (!m.use_bbox) {
        for (auto& v : s.feet) v = 0.77;
      }
      if (!m.use_pose) {
        for (auto& v : s.poses) v = -0.31;
      }
      if (!m.use_bboximg) {
        for (auto& v : s.crops) v = static_cast<std::uint8_t>(255 - v);
      }
    }
    const auto after = net.forward(ff::make_batch<double>(ff::testing::pointers(samples), m), ff::Mode::Eval);
    if (before.data != after.data) return false;
  }
  return true;
}

Outcome gradient_suite() {
  const auto start = Clock::now();
  const ff::FeatureConfig f = ff::testing::tiny_features(4, 32, 16);
  const auto samples = ff::testing::synth_samples(4, 5005, f);
  ff::ModelConfig full = ff::testing::tiny_model();
  full.hidden = 8;
  full.cnn_channels = {4, 6, 8};
  std::map<std::string, int> per_group;
  GradientReport r = check_groups(full, f, samples, per_group);
  std::map<std::string, int> cnn_groups;
  const GradientReport c = check_groups(ff::testing::tiny_model(ff::ModelConfig::cnn_video()), f, samples, cnn_groups);
  r.checked += c.checked;
  r.failed += c.failed;
  r.kinked += c.kinked;
  r.worst = std::max(r.worst, c.worst);
  int fewest = 1 << 30;
  for (const char* g : ff::kParameterGroups) fewest = std::min(fewest, per_group[g]);
  const bool invariant = disabled_branches_invariant(f, samples);
  const double t = seconds_since(start);
  return {r.failed == 0 && fewest >= 5 && invariant && t < 300.0,
          fmt("%d/%d entries within 1e-2 (worst %.2e, >= %d per branch, %d redrawn at a kink), "
              "disabled-branch invariance %s, %.1f s",
              r.checked - r.failed, r.checked, r.worst, fewest, r.kinked, invariant ? "bitwise" : "BROKEN", t)};
}

// 6 and 7 -------------------------------------------------------------------

struct Learnability {
  bool ready = false;
  std::vector<ff::Sample> samples;
  ff::DatasetSplit split;
  double build_seconds = 0.0;
  // (variant, seed) -> (best val, test acc, seconds)
  std::map<std::pair<std::string, std::uint64_t>, std::array<double, 3>> runs;
};

Learnability& learnability() {
  static Learnability L;
  if (L.ready) return L;
  const auto start = Clock::now();
  ff::SynthConfig base;
  base.match_id = "learn";
  base.n_events = 500;
  base.signal_strength = 0.8;
  base.seed = 42;
  std::vector<ff::MatchAnnotation> matches;
  for (const auto& c : ff::plan_matches(base, 25)) matches.push_back(ff::generate_match(c));
  const ff::StudyData data = ff::study_data_from_matches(std::move(matches));
  ff::FeatureConfig f;
  f.crop_size = 64;
  L.samples = data.build(f);
  L.split = ff::split_dataset(L.samples.size(), {400, 50, 50}, 1);
  L.build_seconds = seconds_since(start);
  L.ready = true;
  note(fmt("dataset: %zu samples, %zu rejections, built in %.1f s", L.samples.size(), data.rejections().size(),
           L.build_seconds));
  return L;
}

std::array<double, 3> train_variant(const std::string& name, const ff::ModelConfig& model, std::uint64_t seed) {
  Learnability& L = learnability();
  const auto key = std::make_pair(name, seed);
  if (auto it = L.runs.find(key); it != L.runs.end()) return it->second;
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<const ff::Sample*> out;
    for (auto i : idx) out.push_back(&L.samples[i]);
    return out;
  };
  const auto tr = pick(L.split.train);
  const auto va = pick(L.split.val);
  const auto te = pick(L.split.test);
  const auto start = Clock::now();
  ff::FutureFoulNet<float> net(model, L.samples.front().config, seed);
  ff::TrainConfig tc;
  tc.epochs = 30;
  tc.seed = seed;
  const auto outcome = ff::train(net, tr, va, tc);
  const double test = ff::evaluate(net, te).metrics.accuracy;
  const std::array<double, 3> r{outcome.best_val_accuracy, test, seconds_since(start)};
  note(fmt("%-12s seed %llu: best val %.1f%% (epoch %d), test %.1f%%, %.0f s", name.c_str(),
           static_cast<unsigned long long>(seed), r[0], outcome.best_epoch, r[1], r[2]));
  L.runs[key] = r;
  return r;
}

Outcome learnability_criterion() {
  const auto r = train_variant("full", ff::ModelConfig::full(), 1);
  const double total = learnability().build_seconds + r[2];
  return {r[0] >= 90.0 && total <= 1200.0,
          fmt("best validation accuracy %.1f%% (need >= 90), %.1f min including dataset build", r[0], total / 60.0)};
}

Outcome ablation_ordering() {
  double full = 0;
  double video = 0;
  double cnn = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    full += train_variant("full", ff::ModelConfig::full(), seed)[1] / 3.0;
    video += train_variant("video_gru", ff::ModelConfig::video_gru(), seed)[1] / 3.0;
    cnn += train_variant("cnn_video", ff::ModelConfig::cnn_video(), seed)[1] / 3.0;
  }
  return {full - video >= 5.0 && video - cnn >= 0.0,
          fmt("mean test accuracy: full %.1f%%, CNN+GRU video %.1f%%, CNN video %.1f%% (gaps %+.1f, %+.1f)", full,
              video, cnn, full - video, video - cnn)};
}

// 8 -------------------------------------------------------------------------

Outcome metrics_identity() {
  ff::Rng rng(8008);
  int agree = 0;
  int degenerate = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<ff::Label> pred(n);
    std::vector<ff::Label> act(n);
    const int mode = i % 10;
    for (std::size_t k = 0; k < n; ++k) {
      auto draw = [&] { return rng.bernoulli(0.5) ? ff::Label::Foul : ff::Label::NonFoul; };
      pred[k] = mode == 0 ? ff::Label::Foul : mode == 1 ? ff::Label::NonFoul : draw();
      act[k] = mode == 2 ? ff::Label::Foul : mode == 3 ? ff::Label::NonFoul : draw();
    }
    degenerate += mode < 4 ? 1 : 0;
    const ff::Metrics m = ff::compute_metrics(pred, act);
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool p = pred[k] == ff::Label::Foul;
      const bool a = act[k] == ff::Label::Foul;
      tp += p && a;
      fp += p && !a;
      tn += !p && !a;
      fn += !p && a;
    }
    const double acc = 100.0 * (tp + tn) / static_cast<double>(n);
    const double prec = tp + fp > 0 ? 100.0 * tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? 100.0 * tp / (tp + fn) : 0.0;
    const bool counts = m.confusion.tp == tp && m.confusion.fp == fp && m.confusion.tn == tn && m.confusion.fn == fn;
    const bool flags = m.precision_undefined == (tp + fp == 0) && m.recall_undefined == (tp + fn == 0);
    agree += counts && flags && std::abs(m.accuracy - acc) <= 0.05 && std::abs(m.precision - prec) <= 0.05 &&
                     std::abs(m.recall - rec) <= 0.05
                 ? 1
                 : 0;
  }
  // And through evaluate itself.
  const auto samples = ff::testing::synth_samples(6, 8009, ff::testing::tiny_features());
  ff::FutureFoulNet<float> net(ff::testing::tiny_model(), samples.front().config, 3);
  const auto ev = ff::evaluate(net, ff::testing::pointers(samples));
  const auto& c = ev.metrics.confusion;
  const bool eval_ok = c.total() == samples.size() &&
                       std::abs(ev.metrics.accuracy - 100.0 * static_cast<double>(c.tp + c.tn) /
                                                          static_cast<double>(c.total())) <= 0.05;
  return {agree == 100 && eval_ok,
          fmt("%d/100 vectors match (%d degenerate), evaluate %s", agree, degenerate, eval_ok ? "consistent" : "OFF")};
}

// 9 -------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct EndToEnd {
  int code = 0;
  std::string metrics;
  std::string samples_hash;
  std::string data_hash;
};

EndToEnd end_to_end(const std::filesystem::path& root) {
  std::ostringstream out;
  std::ostringstream err;
  const auto run = [&](std::vector<std::string> args) { return ff::cli::run(args, out, err); };
  const auto s = [&](const char* name) { return (root / name).string(); };
  EndToEnd e;
  e.code = run({"synth", "--events", "24", "--seed", "9", "--out", s("data")});
  if (e.code == 0) {
    e.code = run({"build", "--data", s("data"), "--out", s("samples"), "--size", "32", "--crop", "16", "--split",
                  "14,5,5", "--seed", "9"});
  }
  if (e.code == 0) {
    e.code = run({"train", "--samples", s("samples"), "--out", s("run"), "--epochs", "3", "--batch", "8", "--seed", "9"});
  }
  if (e.code == 0) {
    e.code = run({"eval", "--checkpoint", (root / "run" / "model.ckpt").string(), "--samples", s("samples"), "--out",
                  s("eval")});
  }
  if (e.code != 0) {
    note("end-to-end run failed: " + err.str());
    return e;
  }
  const std::set<std::string> skip{ff::kRunManifestName};
  e.metrics = slurp(root / "eval" / "metrics.json");
  e.samples_hash = ff::content_hash(root / "samples", skip);
  e.data_hash = ff::content_hash(root / "data", skip);
  return e;
}

Outcome determinism() {
  ff::testing::TempDir a("ffacc9a");
  ff::testing::TempDir b("ffacc9b");
  const EndToEnd x = end_to_end(a.path());
  const EndToEnd y = end_to_end(b.path());
  const bool ok = x.code == 0 && y.code == 0 && x.metrics == y.metrics && x.samples_hash == y.samples_hash &&
                  x.data_hash == y.data_hash;
  return {ok, fmt("metrics %s, sample tree %s (%.12s), dataset tree %s", x.metrics == y.metrics ? "identical" : "DIFFER",
                  x.samples_hash == y.samples_hash ? "identical" : "DIFFERS", x.samples_hash.c_str(),
                  x.data_hash == y.data_hash ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"selection oracle", selection_oracle},
      {"backtracking oracle", backtracking_oracle},
      {"schema round-trip and counting", schema_round_trip},
      {"shape suite", shape_suite},
      {"gradient suite", gradient_suite},
      {"learnability", learnability_criterion},
      {"ablation ordering", ablation_ordering},
      {"metrics identity", metrics_identity},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
