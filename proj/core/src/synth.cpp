// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include "futurefoul/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "futurefoul/annotation.hpp"
#include "futurefoul/dataset.hpp"
#include "futurefoul/error.hpp"
#include "futurefoul/rng.hpp"
#include "json.hpp"

namespace futurefoul {

namespace {

constexpr int kPlacementTries = 20000;
constexpr double kBallRadius = 5.0;
constexpr double kDriftClamp = 5.0;
constexpr double kPairMin = 65.0;
constexpr double kPairMax = 80.0;
constexpr double kNearMin = 95.0;
constexpr double kNearMax = 120.0;
constexpr double kNearSpacing = 92.0;
constexpr double kPathClearance = 30.0;
constexpr double kFarMin = 190.0;
constexpr double kFarMax = 330.0;
constexpr double kFarFromNear = 100.0;
constexpr double kFarSpacing = 60.0;
constexpr double kDecoyMin = 92.0;
constexpr double kDecoyMax = 130.0;
constexpr int kConvergeFrames = 13;
constexpr double kInvisibleRate = 0.05;
constexpr int kGapStart = 20;

// Keypoint template as fractions of the box, COCO-17 order.
constexpr std::array<std::array<double, 2>, kKeypointCount> kPoseTemplate{{
    {0.50, 0.08}, {0.45, 0.06}, {0.55, 0.06}, {0.40, 0.08}, {0.60, 0.08}, {0.30, 0.22},
    {0.70, 0.22}, {0.22, 0.38}, {0.78, 0.38}, {0.18, 0.52}, {0.82, 0.52}, {0.38, 0.55},
    {0.62, 0.55}, {0.38, 0.75}, {0.62, 0.75}, {0.38, 0.95}, {0.62, 0.95},
}};

constexpr std::array<Rgb, 12> kPalette{{
    {220, 40, 40},  {40, 80, 220},  {240, 200, 30}, {160, 60, 200}, {250, 130, 20}, {20, 200, 220},
    {230, 90, 170}, {120, 70, 30},  {20, 20, 20},   {130, 130, 140}, {90, 200, 120}, {0, 120, 130},
}};

constexpr Rgb kField{40, 140, 60};
constexpr Rgb kBall{255, 255, 255};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

double dist(const Point& a, const Point& b) { return euclidean(a, b); }

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, {a.x + t * dx, a.y + t * dy});
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct PlayerPlan {
  Point base;
  double w = 24.0;
  double h = 54.0;
  std::vector<Point> centers;  // per window frame
};

bool inside(const Point& c, int width, int height) {
  return c.x >= 20.0 && c.x <= width - 20.0 && c.y >= 35.0 && c.y <= height - 35.0;
}

Point polar(const Point& o, double r, double angle) { return {o.x + r * std::cos(angle), o.y + r * std::sin(angle)}; }

/// Near players, then far players. Returns false when placement failed.
bool place_players(Rng& rng, const SynthConfig& cfg, const Point& ball, std::size_t near_count, bool decoy,
                   std::vector<Point>& out) {
  const auto total = static_cast<std::size_t>(cfg.players_per_frame);
  constexpr double kTau = 6.283185307179586;
  for (int attempt = 0; attempt < kPlacementTries; ++attempt) {
    out.clear();
    bool ok = true;
    for (std::size_t i = 0; i < near_count && ok; ++i) {
      bool placed = false;
      for (int t = 0; t < 200 && !placed; ++t) {
        const double r = i < 2 ? rng.uniform(kPairMin, kPairMax) : rng.uniform(kNearMin, kNearMax);
        const Point c = polar(ball, r, rng.uniform(0.0, kTau));
        if (!inside(c, cfg.width, cfg.height)) continue;
        bool spaced = true;
        for (const auto& o : out) spaced = spaced && dist(o, c) >= kNearSpacing;
        if (spaced) {
          out.push_back(c);
          placed = true;
        }
      }
      ok = placed;
    }
    if (!ok) continue;
    if (near_count >= 2) {
      const std::size_t a = 0;
      const std::size_t b = 1;
      for (std::size_t k = 2; k < near_count && ok; ++k) {
        const Point mid{(out[a].x + out[b].x) / 2, (out[a].y + out[b].y) / 2};
        ok = segment_distance(out[k], out[a], mid) >= kPathClearance &&
             segment_distance(out[k], out[b], mid) >= kPathClearance;
      }
      if (!ok) continue;
    }
    for (std::size_t i = near_count; i < total && ok; ++i) {
      bool placed = false;
      for (int t = 0; t < 400 && !placed; ++t) {
        Point c;
        if (decoy && i == near_count + 1) {
          c = polar(out[near_count], rng.uniform(kDecoyMin, kDecoyMax), rng.uniform(0.0, kTau));
          if (dist(c, ball) < kFarMin) continue;
        } else {
          c = polar(ball, rng.uniform(kFarMin, kFarMax), rng.uniform(0.0, kTau));
        }
        if (!inside(c, cfg.width, cfg.height)) continue;
        bool spaced = true;
        for (std::size_t k = 0; k < out.size(); ++k) {
          const double limit = k < near_count ? kFarFromNear : kFarSpacing;
          spaced = spaced && dist(out[k], c) >= limit;
        }
        if (spaced) {
          out.push_back(c);
          placed = true;
        }
      }
      ok = placed;
    }
    if (ok) return true;
  }
  return false;
}

/// Smoothed random walk offsets bounded by the drift clamp.
std::vector<Point> drift(Rng& rng, int frames) {
  std::vector<Point> out(static_cast<std::size_t>(frames));
  Point v;
  Point off;
  for (int t = 0; t < frames; ++t) {
    v.x = 0.7 * v.x + 0.3 * rng.normal();
    v.y = 0.7 * v.y + 0.3 * rng.normal();
    off.x = std::clamp(off.x + v.x, -kDriftClamp, kDriftClamp);
    off.y = std::clamp(off.y + v.y, -kDriftClamp, kDriftClamp);
    out[static_cast<std::size_t>(t)] = off;
  }
  return out;
}

/// Moves two players toward each other over the last frames until `gap` px
/// separate their centres; positions stay fixed afterwards.
void converge(PlayerPlan& a, PlayerPlan& b, int begin, double gap) {
  const auto s = static_cast<std::size_t>(begin - 1);
  const Point sa = a.centers[s];
  const Point sb = b.centers[s];
  const Point mid{(sa.x + sb.x) / 2, (sa.y + sb.y) / 2};
  const double d = std::max(1e-9, dist(sa, sb));
  const Point u{(sb.x - sa.x) / d, (sb.y - sa.y) / d};
  const Point fa{mid.x - u.x * gap / 2, mid.y - u.y * gap / 2};
  const Point fb{mid.x + u.x * gap / 2, mid.y + u.y * gap / 2};
  for (std::size_t t = s + 1; t < a.centers.size(); ++t) {
    const double f = std::min(1.0, static_cast<double>(t - s) / kConvergeFrames);
    a.centers[t] = {sa.x + f * (fa.x - sa.x), sa.y + f * (fa.y - sa.y)};
    b.centers[t] = {sb.x + f * (fb.x - sb.x), sb.y + f * (fb.y - sb.y)};
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_events <= 0) throw ConfigError("n_events must be positive");
  if (!(foul_fraction >= 0.0 && foul_fraction <= 1.0)) throw ConfigError("foul_fraction must be in [0, 1]");
  if (width <= 0 || height <= 0) throw ConfigError("frame size must be positive");
  if (!(fps > 0.0)) throw ConfigError("fps must be positive");
  if (players_per_frame <= 0) throw ConfigError("players_per_frame must be positive");
  if (!(signal_strength > 0.0 && signal_strength <= 1.0)) {
    throw ConfigError("signal_strength must be in (0, 1]; without a signal the labels would be noise");
  }
  if (gap && (gap->length <= 0 || gap->player_ref < 0 || gap->player_ref >= players_per_frame)) {
    throw ConfigError("gap injection needs a valid player ref and a positive length");
  }
  if (ball_missing_every < 0) throw ConfigError("ball_missing_every must be non-negative");
  if (!(decoy_probability >= 0.0 && decoy_probability <= 1.0)) throw ConfigError("decoy_probability must be in [0, 1]");
}

MatchAnnotation generate_match(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  MatchAnnotation match;
  match.match_id = cfg.match_id;
  match.fps = cfg.fps;
  match.width = cfg.width;
  match.height = cfg.height;

  const LabelSets sets;
  const auto n = static_cast<std::size_t>(cfg.n_events);
  const auto fouls = static_cast<std::size_t>(std::llround(cfg.foul_fraction * static_cast<double>(n)));
  std::vector<Label> labels(n, Label::NonFoul);
  std::fill_n(labels.begin(), fouls, Label::Foul);
  rng.shuffle(labels);

  const auto near_count = std::min<std::size_t>(kTrackedPlayers, static_cast<std::size_t>(cfg.players_per_frame));
  const double swing = 24.0 * cfg.signal_strength;
  const double gap_px = 8.0 + 10.0 * (1.0 - cfg.signal_strength);
  std::size_t non_foul_tag = 0;

  for (std::size_t e = 0; e < n; ++e) {
    EventAnnotation event;
    event.time_s = synth::kFirstEventS + synth::kEventSpacingS * static_cast<int>(e);
    if (labels[e] == Label::Foul) {
      event.label_text = sets.foul.front();
    } else {
      event.label_text = sets.non_foul[non_foul_tag++ % sets.non_foul.size()];
    }
    match.events.push_back(event);

    const auto window = extract_window(event, cfg.fps).value();
    const int frames = window.input_length + 1;  // input frames plus the anchor
    const int signal_begin = window.input_length - synth::kSignalFrames;
    const bool foul = labels[e] == Label::Foul;
    const bool decoy = cfg.players_per_frame >= static_cast<int>(near_count) + 2 && rng.bernoulli(cfg.decoy_probability);

    const Point ball_base{rng.uniform(cfg.width / 2.0 - 100.0, cfg.width / 2.0 + 100.0),
                          rng.uniform(cfg.height / 2.0 - 50.0, cfg.height / 2.0 + 50.0)};
    std::vector<Point> bases;
    if (!place_players(rng, cfg, ball_base, near_count, decoy, bases)) {
      throw Error(fmt::format("cannot place {} players in a {}x{} frame", cfg.players_per_frame, cfg.width, cfg.height));
    }

    std::vector<PlayerPlan> players(bases.size());
    for (std::size_t p = 0; p < players.size(); ++p) {
      auto& plan = players[p];
      plan.base = bases[p];
      plan.w = rng.uniform(20.0, 28.0);
      plan.h = rng.uniform(48.0, 60.0);
      const auto off = drift(rng, frames);
      plan.centers.resize(static_cast<std::size_t>(frames));
      for (int t = 0; t < frames; ++t) {
        plan.centers[static_cast<std::size_t>(t)] = {plan.base.x + off[static_cast<std::size_t>(t)].x,
                                                      plan.base.y + off[static_cast<std::size_t>(t)].y};
      }
    }
    const auto ball_off = drift(rng, frames);

    std::pair<std::size_t, std::size_t> pair{0, 0};
    if (foul && near_count >= 2) {
      pair = {0, 1};
      converge(players[pair.first], players[pair.second], signal_begin, gap_px);
    }
    if (decoy) converge(players[near_count], players[near_count + 1], signal_begin, gap_px);

    const bool ball_missing = cfg.ball_missing_every > 0 && (e + 1) % static_cast<std::size_t>(cfg.ball_missing_every) == 0;

    for (int t = 0; t < frames; ++t) {
      FrameAnnotation frame;
      frame.index = window.start_frame + t;
      if (!(ball_missing && t == frames - 1)) {
        const Point b{ball_base.x + ball_off[static_cast<std::size_t>(t)].x,
                      ball_base.y + ball_off[static_cast<std::size_t>(t)].y};
        frame.ball = BBox{round2(b.x - kBallRadius), round2(b.y - kBallRadius), 2 * kBallRadius, 2 * kBallRadius};
      }
      for (std::size_t p = 0; p < players.size(); ++p) {
        const int ref = static_cast<int>(p);
        const bool swinging = foul && (p == pair.first || p == pair.second) && t >= signal_begin;
        const bool legs_protected = foul && (p == pair.first || p == pair.second) && t >= signal_begin - 1;
        // Draw the pose jitter before deciding on the gap so the random stream
        // does not depend on it.
        std::array<Keypoint, kKeypointCount> kps{};
        const auto& plan = players[p];
        const Point c = plan.centers[static_cast<std::size_t>(t)];
        const double x0 = c.x - plan.w / 2;
        const double y0 = c.y - plan.h / 2;
        for (std::size_t k = 0; k < kKeypointCount; ++k) {
          double kx = x0 + kPoseTemplate[k][0] * plan.w + rng.uniform(-1.0, 1.0);
          const double ky = y0 + kPoseTemplate[k][1] * plan.h + rng.uniform(-1.0, 1.0);
          const auto joint = static_cast<Joint>(k);
          const bool ankle = joint == Joint::LeftAnkle || joint == Joint::RightAnkle;
          const bool knee = joint == Joint::LeftKnee || joint == Joint::RightKnee;
          if (swinging) {
            const double sign = (t % 2 == 0) ? 1.0 : -1.0;
            if (ankle) kx += sign * swing;
            if (knee) kx += sign * swing / 2;
          }
          const bool hidden = rng.bernoulli(kInvisibleRate) && !(legs_protected && (ankle || knee));
          kps[k] = hidden ? Keypoint{} : Keypoint{round2(kx), round2(ky), true};
        }
        if (cfg.gap && cfg.gap->player_ref == ref && t >= kGapStart && t < kGapStart + cfg.gap->length) continue;
        PlayerDetection det;
        det.player_ref = ref;
        det.bbox = BBox{round2(x0), round2(y0), round2(plan.w), round2(plan.h)};
        det.pose = PoseKeypoints(kps);
        frame.players.push_back(std::move(det));
      }
      match.frames.push_back(std::move(frame));
    }
  }
  validate_match(match);
  return match;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

struct NearFive {
  ClipWindow window;
  std::vector<int> refs;
};

std::optional<NearFive> near_five(const MatchAnnotation& match, const EventAnnotation& event) {
  auto window = extract_window(event, match.fps);
  if (!window) return std::nullopt;
  const FrameAnnotation* anchor = match.find_frame(window.value().anchor_frame());
  if (anchor == nullptr || !anchor->ball || anchor->players.size() < kTrackedPlayers) return std::nullopt;
  // Independent of select_anchor_players: full sort of (distance, ref).
  const Point ball = bbox_center(*anchor->ball);
  std::vector<std::pair<double, int>> all;
  for (const auto& p : anchor->players) all.emplace_back(euclidean(bbox_center(p.bbox), ball), p.player_ref);
  std::sort(all.begin(), all.end());
  NearFive out{window.value(), {}};
  for (std::size_t i = 0; i < kTrackedPlayers; ++i) out.refs.push_back(all[i].second);
  return out;
}

/// Largest ankle displacement of `ref` between frame index-1 and index; 0 when
/// either frame lacks a visible ankle.
double ankle_swing(const MatchAnnotation& match, int ref, int index) {
  const FrameAnnotation* cur = match.find_frame(index);
  const FrameAnnotation* prev = match.find_frame(index - 1);
  if (cur == nullptr || prev == nullptr) return 0.0;
  const PlayerDetection* a = cur->find_player(ref);
  const PlayerDetection* b = prev->find_player(ref);
  if (a == nullptr || b == nullptr || !a->pose || !b->pose) return 0.0;
  double best = 0.0;
  for (Joint j : {Joint::LeftAnkle, Joint::RightAnkle}) {
    const Keypoint& p = (*a->pose)[j];
    const Keypoint& q = (*b->pose)[j];
    if (p.visible && q.visible) best = std::max(best, euclidean({p.x, p.y}, {q.x, q.y}));
  }
  return best;
}

}  // namespace

std::optional<Label> oracle_label(const MatchAnnotation& match, const EventAnnotation& event) {
  const auto near = near_five(match, event);
  if (!near) return std::nullopt;
  const int begin = near->window.start_frame + near->window.input_length - synth::kSignalFrames;
  for (int index = begin; index <= near->window.input_end(); ++index) {
    const FrameAnnotation* frame = match.find_frame(index);
    if (frame == nullptr) continue;
    for (std::size_t i = 0; i < near->refs.size(); ++i) {
      for (std::size_t j = i + 1; j < near->refs.size(); ++j) {
        const PlayerDetection* a = frame->find_player(near->refs[i]);
        const PlayerDetection* b = frame->find_player(near->refs[j]);
        if (a == nullptr || b == nullptr) continue;
        if (euclidean(bbox_center(a->bbox), bbox_center(b->bbox)) >= synth::kOverlapThreshold) continue;
        const double swing = std::max(ankle_swing(match, near->refs[i], index), ankle_swing(match, near->refs[j], index));
        if (swing > synth::kSwingThreshold) return Label::Foul;
      }
    }
  }
  return Label::NonFoul;
}

std::optional<OracleStats> oracle_stats(const MatchAnnotation& match, const EventAnnotation& event) {
  const auto near = near_five(match, event);
  if (!near) return std::nullopt;
  OracleStats s;
  s.min_pair_distance = 1e300;
  const int begin = near->window.start_frame + near->window.input_length - synth::kSignalFrames;
  for (int index = begin; index <= near->window.input_end(); ++index) {
    const FrameAnnotation* frame = match.find_frame(index);
    if (frame == nullptr) continue;
    for (std::size_t i = 0; i < near->refs.size(); ++i) {
      s.max_pair_swing = std::max(s.max_pair_swing, ankle_swing(match, near->refs[i], index));
      const PlayerDetection* a = frame->find_player(near->refs[i]);
      for (std::size_t j = i + 1; j < near->refs.size(); ++j) {
        const PlayerDetection* b = frame->find_player(near->refs[j]);
        if (a == nullptr || b == nullptr) continue;
        s.min_pair_distance = std::min(s.min_pair_distance, euclidean(bbox_center(a->bbox), bbox_center(b->bbox)));
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rendering

Rgb player_color(int player_ref) noexcept {
  const auto n = static_cast<int>(kPalette.size());
  return kPalette[static_cast<std::size_t>(((player_ref % n) + n) % n)];
}

Image render_frame(const MatchAnnotation& match, const FrameAnnotation& frame) {
  Image img(match.width, match.height);
  fill_rect(img, 0, 0, match.width, match.height, kField);
  std::vector<const PlayerDetection*> order;
  for (const auto& p : frame.players) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->player_ref < b->player_ref; });
  for (const auto* p : order) fill_rect(img, p->bbox.x, p->bbox.y, p->bbox.w, p->bbox.h, player_color(p->player_ref));
  if (frame.ball) {
    const Point c = bbox_center(*frame.ball);
    fill_disc(img, c.x, c.y, std::max(frame.ball->w, frame.ball->h) / 2, kBall);
  }
  return img;
}

Image RenderedFrameSource::frame(int index) const {
  const FrameAnnotation* f = match_.find_frame(index);
  if (f == nullptr) {
    throw MissingFrameError("no annotation to render frame " + std::to_string(index) + " of " + match_.match_id, index);
  }
  return render_frame(match_, *f);
}

// ---------------------------------------------------------------------------
// Datasets

std::vector<SynthConfig> plan_matches(const SynthConfig& config, int events_per_match) {
  config.validate();
  if (events_per_match <= 0) throw ConfigError("events_per_match must be positive");
  std::vector<SynthConfig> out;
  int remaining = config.n_events;
  for (int k = 0; remaining > 0; ++k) {
    SynthConfig c = config;
    c.n_events = std::min(remaining, events_per_match);
    c.match_id = fmt::format("{}_{:03d}", config.match_id, k);
    c.seed = mix(config.seed, static_cast<std::uint64_t>(k));
    remaining -= c.n_events;
    out.push_back(std::move(c));
  }
  return out;
}

void write_synthetic_match(const std::filesystem::path& dataset_dir, const MatchAnnotation& match) {
  const auto dir = dataset_dir / match.match_id;
  const auto frames = dir / "frames";
  std::filesystem::create_directories(frames);
  write_match(dir / "annotation.json", match);
  for (const auto& f : match.frames) write_png(DirectoryFrameSource::frame_path(frames, f.index), render_frame(match, f));
}

void write_dataset_index(const std::filesystem::path& dataset_dir, const std::vector<std::string>& match_ids) {
  nlohmann::ordered_json doc;
  doc["matches"] = nlohmann::ordered_json::array();
  for (const auto& id : match_ids) {
    doc["matches"].push_back({{"match_id", id}, {"annotation", id + "/annotation.json"}, {"frames", id + "/frames"}});
  }
  std::ofstream out(dataset_dir / "dataset.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dataset_dir / "dataset.json").string());
  out << doc.dump(2) << "\n";
}

std::vector<DatasetMatch> read_dataset_index(const std::filesystem::path& dataset_dir) {
  std::vector<DatasetMatch> out;
  const auto index = dataset_dir / "dataset.json";
  if (std::filesystem::exists(index)) {
    std::ifstream in(index, std::ios::binary);
    try {
      const auto doc = nlohmann::json::parse(in);
      for (const auto& m : doc.at("matches")) {
        out.push_back({m.at("match_id").get<std::string>(), dataset_dir / m.at("annotation").get<std::string>(),
                       dataset_dir / m.at("frames").get<std::string>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(index.string() + ": " + e.what());
    }
    return out;
  }
  // No index: every subdirectory holding an annotation.json is a match.
  if (!std::filesystem::is_directory(dataset_dir)) throw Error("dataset directory not found: " + dataset_dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dataset_dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "annotation.json")) {
      out.push_back({entry.path().filename().string(), entry.path() / "annotation.json", entry.path() / "frames"});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.match_id < b.match_id; });
  if (out.empty()) throw Error("no matches found under " + dataset_dir.string());
  return out;
}

}  // namespace futurefoul
