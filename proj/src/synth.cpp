#include "posewatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <json.hpp>

#include "posewatch/error.hpp"
#include "posewatch/io.hpp"
#include "posewatch/preprocess.hpp"
#include "posewatch/rng.hpp"

namespace posewatch {

namespace {

// Stick-figure proportions in torso heights.
constexpr double kShoulderHalf = 0.18;
constexpr double kHipHalf = 0.12;
constexpr double kUpperArm = 0.55;
constexpr double kForearm = 0.5;
constexpr double kThigh = 0.95;
constexpr double kShin = 0.95;
constexpr double kStride = 0.7;
constexpr double kCleanConfidence = 0.95;

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

Point2 lerp(Point2 a, Point2 b, double u) { return a + u * (b - a); }

// Middle joint of a two-link chain from `root` to `tip`. `bend` picks the
// side: the solution whose offset has positive dot with it.
Point2 two_link(Point2 root, Point2& tip, double l1, double l2, Point2 bend) {
  Point2 d = tip - root;
  double r = norm(d);
  const double r_max = (l1 + l2) * 0.999;
  const double r_min = std::abs(l1 - l2) + 1e-3;
  if (r < 1e-9) {
    d = {0.0, 1.0};
    r = 0.0;
  }
  const Point2 u = (1.0 / std::max(r, 1e-9)) * d;
  if (r > r_max || r < r_min) {
    r = std::clamp(r, r_min, r_max);
    tip = root + r * u;
  }
  const double along = (l1 * l1 - l2 * l2 + r * r) / (2.0 * r);
  const double h = std::sqrt(std::max(0.0, l1 * l1 - along * along));
  Point2 n{-u.y, u.x};
  if (dot(n, bend) < 0.0) n = -1.0 * n;
  return root + along * u + h * n;
}

struct FigureState {
  Point2 hip;         // hip center, world units
  double yaw = 1.0;   // head direction in [-1, 1]; sign is the facing side
  double gait = 0.0;  // stride phase, radians
  std::optional<Point2> left_wrist;
  std::optional<Point2> right_wrist;
};

// Person's left is on the +x side (a camera-facing figure).
Skeleton pose_figure(const FigureState& f, double scale, Point2 origin) {
  std::array<Point2, kNumKeypoints> w{};
  const Point2 hip = f.hip;
  const Point2 ls = hip + Point2{kShoulderHalf, -1.0};
  const Point2 rs = hip + Point2{-kShoulderHalf, -1.0};
  const Point2 lh = hip + Point2{kHipHalf, 0.0};
  const Point2 rh = hip + Point2{-kHipHalf, 0.0};
  const double side = f.yaw >= 0.0 ? 1.0 : -1.0;

  const Point2 head = hip + Point2{0.0, -1.38};
  w[0] = head + Point2{0.13 * f.yaw, 0.05};
  w[1] = head + Point2{0.09 * f.yaw + 0.03, 0.0};
  w[2] = head + Point2{0.09 * f.yaw - 0.03, 0.0};
  w[3] = head + Point2{0.07, 0.0};
  w[4] = head + Point2{-0.07, 0.0};
  w[5] = ls;
  w[6] = rs;

  const double swing = 0.12 * std::sin(f.gait);
  Point2 lw = f.left_wrist.value_or(ls + Point2{0.05 * side + swing, 0.93});
  Point2 rw = f.right_wrist.value_or(rs + Point2{0.05 * side - swing, 0.93});
  w[7] = two_link(ls, lw, kUpperArm, kForearm, {0.0, 1.0});
  w[8] = two_link(rs, rw, kUpperArm, kForearm, {0.0, 1.0});
  w[9] = lw;
  w[10] = rw;
  w[11] = lh;
  w[12] = rh;

  const double step = 0.25 * std::sin(f.gait);
  const double lift = 0.08 * std::max(0.0, std::cos(f.gait));
  Point2 la = lh + Point2{step, 1.85 - lift};
  Point2 ra = rh + Point2{-step, 1.85 - 0.08 * std::max(0.0, -std::cos(f.gait))};
  w[13] = two_link(lh, la, kThigh, kShin, {side, 0.0});
  w[14] = two_link(rh, ra, kThigh, kShin, {side, 0.0});
  w[15] = la;
  w[16] = ra;

  Skeleton s;
  for (std::size_t j = 0; j < kNumKeypoints; ++j) {
    s.keypoints[j] = {origin.x + scale * w[j].x, origin.y + scale * w[j].y, kCleanConfidence};
  }
  return s;
}

void frame_box(Skeleton& s, double scale) {
  double x1 = INFINITY, y1 = INFINITY, x2 = -INFINITY, y2 = -INFINITY;
  for (const auto& kp : s.keypoints) {
    if (!kp.valid()) continue;
    x1 = std::min(x1, kp.x);
    x2 = std::max(x2, kp.x);
    y1 = std::min(y1, kp.y);
    y2 = std::max(y2, kp.y);
  }
  if (!(x1 <= x2)) {
    // Every keypoint dropped out: fall back to all of them.
    for (const auto& kp : s.keypoints) {
      x1 = std::min(x1, kp.x);
      x2 = std::max(x2, kp.x);
      y1 = std::min(y1, kp.y);
      y2 = std::max(y2, kp.y);
    }
  }
  s.bbox = {x1 - 0.15 * scale, y1 - 0.2 * scale, x2 + 0.15 * scale, y2 + 0.05 * scale};
}

void perturb(Skeleton& s, const ScenarioSpec& spec, Rng& rng) {
  if (spec.noise_sigma <= 0.0) return;
  for (auto& kp : s.keypoints) {
    kp.x += rng.normal(0.0, spec.noise_sigma);
    kp.y += rng.normal(0.0, spec.noise_sigma);
    kp.confidence = std::clamp(0.95 - std::abs(rng.normal(0.0, 0.03)), 0.5, 1.0);
    if (rng.bernoulli(spec.dropout)) kp.confidence = rng.uniform(0.05, 0.25);
  }
}

// Scripted world state of both figures at time t.
struct Script {
  virtual ~Script() = default;
  virtual void at(double t, FigureState& a, FigureState& b) const = 0;
};

double gait_of(double x) { return std::numbers::pi * x / kStride; }

struct SnatchScript final : Script {
  double te, va, vb, gap, vflee, xb0, yb;
  double face_victim;  // victim's initial yaw
  bool victim_turns;

  double victim_x(double t) const { return xb0 + vb * t; }

  double aggressor_x(double t) const {
    const double t_reach = te - 0.3;
    const double t_flee = te + 0.15;
    if (t <= t_reach) return victim_x(t_reach) - gap - va * (t_reach - t);
    if (t <= t_flee) return victim_x(t) - gap;
    const double ramp = 0.3;
    const double x0 = victim_x(t_flee) - gap;
    const double tau = t - t_flee;
    const double dv = -vflee - vb;
    if (tau <= ramp) return x0 + vb * tau + dv * tau * tau / (2.0 * ramp);
    return x0 + vb * ramp + dv * ramp / 2.0 - vflee * (tau - ramp);
  }

  void at(double t, FigureState& a, FigureState& b) const override {
    b.hip = {victim_x(t), yb};
    b.gait = gait_of(b.hip.x);
    b.yaw = face_victim;
    if (victim_turns) {
      b.yaw = face_victim + (-1.0 - face_victim) * smoothstep((t - te - 0.2) / 0.3);
    }

    a.hip = {aggressor_x(t), yb};
    a.gait = gait_of(a.hip.x);
    a.yaw = 1.0 - 2.0 * smoothstep((t - te - 0.15) / 0.2);

    const Point2 ls = a.hip + Point2{kShoulderHalf, -1.0};
    const Point2 rest = ls + Point2{0.05 + 0.12 * std::sin(a.gait), 0.93};
    const Point2 target = b.hip + Point2{-0.05, -0.3};
    if (t >= te - 0.3 && t <= te + 0.3) {
      Point2 w;
      if (t <= te) {
        w = lerp(rest, target, smoothstep((t - (te - 0.3)) / 0.3));
      } else if (t <= te + 0.1) {
        w = target;
      } else {
        w = lerp(target, rest, smoothstep((t - te - 0.1) / 0.2));
      }
      a.left_wrist = w;
    } else {
      a.left_wrist.reset();
    }
    a.right_wrist.reset();
  }
};

struct WalkByScript final : Script {
  double te, va, vb, offset, y0;

  void at(double t, FigureState& a, FigureState& b) const override {
    a.hip = {-va * (te - t) - 0.2, y0};
    b.hip = {vb * (te - t) + 0.2, y0 + offset};
    a.yaw = 1.0;
    b.yaw = -1.0;
    a.gait = gait_of(a.hip.x);
    b.gait = gait_of(b.hip.x);
    a.left_wrist.reset();
    a.right_wrist.reset();
    b.left_wrist.reset();
    b.right_wrist.reset();
  }
};

struct HandshakeScript final : Script {
  double te, gap, approach, y0;

  void at(double t, FigureState& a, FigureState& b) const override {
    const double t_stop = te - 0.8;
    const double half = gap / 2.0 + approach * std::max(0.0, t_stop - t);
    a.hip = {-half, y0};
    b.hip = {half, y0};
    a.yaw = 1.0;
    b.yaw = -1.0;
    a.gait = gait_of(a.hip.x);
    b.gait = gait_of(b.hip.x);

    const Point2 a_sh = a.hip + Point2{kShoulderHalf, -1.0};
    const Point2 b_sh = b.hip + Point2{-kShoulderHalf, -1.0};
    const Point2 a_rest = a_sh + Point2{0.05 + 0.12 * std::sin(a.gait), 0.93};
    const Point2 b_rest = b_sh + Point2{-0.05 - 0.12 * std::sin(b.gait), 0.93};
    Point2 grip{0.0, y0 - 0.55};
    const double hold_end = te + 1.0;
    if (t >= te && t <= hold_end) grip.y += 0.05 * std::sin(2.0 * std::numbers::pi * 2.0 * (t - te));

    a.left_wrist.reset();
    a.right_wrist.reset();
    b.left_wrist.reset();
    b.right_wrist.reset();
    double u = 0.0;
    if (t >= t_stop && t <= te) u = smoothstep((t - t_stop) / 0.8);
    if (t > te && t <= hold_end) u = 1.0;
    if (t > hold_end) u = 1.0 - smoothstep((t - hold_end) / 0.6);
    if (u > 0.0) {
      // Both use their right hands, which sit on the far side for b.
      a.left_wrist = lerp(a_rest, grip, u);
      b.right_wrist = lerp(b_rest, grip, u);
    }
  }
};

struct StandingScript final : Script {
  double gap, yaw_a, yaw_b, y0;

  void at(double, FigureState& a, FigureState& b) const override {
    a.hip = {-gap / 2.0, y0};
    b.hip = {gap / 2.0, y0};
    a.yaw = yaw_a;
    b.yaw = yaw_b;
    a.gait = b.gait = 0.0;
  }
};

double pick_sign(Rng& rng) { return rng.bernoulli(0.5) ? 1.0 : -1.0; }

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kSnatch:
      return "snatch";
    case ScenarioKind::kWalkBy:
      return "walk_by";
    case ScenarioKind::kHandshake:
      return "handshake";
    case ScenarioKind::kStanding:
      return "standing";
  }
  return "unknown";
}

ScenarioKind scenario_from_string(const std::string& name) {
  for (auto k : {ScenarioKind::kSnatch, ScenarioKind::kWalkBy, ScenarioKind::kHandshake,
                 ScenarioKind::kStanding}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown scenario '" + name + "'");
}

void ScenarioSpec::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kInvalidSpec, msg); };
  if (!(duration > 0.0) || !std::isfinite(duration)) bad("duration must be positive");
  if (!(fps > 0.0) || !std::isfinite(fps)) bad("fps must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) bad("noise_sigma must be >= 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) bad("scale must be positive");
  if (!(dropout >= 0.0 && dropout <= 1.0)) bad("dropout must lie in [0, 1]");
  if (std::lround(duration * fps) < 2) bad("clip needs at least two frames");
}

Clip generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  Clip clip;
  clip.spec = spec;
  clip.name = to_string(spec.kind);
  clip.label = spec.kind == ScenarioKind::kSnatch ? 1 : 0;

  const double mirror = pick_sign(rng);
  const double te = rng.uniform(0.4, 0.6) * spec.duration;
  const double y0 = rng.uniform(-0.3, 0.3);

  std::unique_ptr<Script> script;
  switch (spec.kind) {
    case ScenarioKind::kSnatch: {
      auto s = std::make_unique<SnatchScript>();
      s->te = te;
      s->va = rng.uniform(1.2, 2.0);
      s->vb = rng.uniform(-0.3, 0.3);
      s->gap = rng.uniform(0.75, 0.85);
      s->vflee = rng.uniform(3.0, 4.0);
      s->yb = y0;
      s->xb0 = -s->vb * te + 0.5;
      s->victim_turns = rng.bernoulli(0.5);
      s->face_victim = s->victim_turns ? 1.0 : -1.0;
      script = std::move(s);
      break;
    }
    case ScenarioKind::kWalkBy: {
      auto s = std::make_unique<WalkByScript>();
      s->te = te;
      s->va = rng.uniform(0.9, 1.6);
      s->vb = rng.uniform(0.9, 1.6);
      s->offset = pick_sign(rng) * rng.uniform(1.0, 1.4);
      s->y0 = y0;
      script = std::move(s);
      break;
    }
    case ScenarioKind::kHandshake: {
      auto s = std::make_unique<HandshakeScript>();
      s->te = te;
      s->gap = rng.uniform(1.3, 1.6);
      s->approach = rng.uniform(0.3, 0.6);
      s->y0 = y0;
      script = std::move(s);
      break;
    }
    case ScenarioKind::kStanding: {
      auto s = std::make_unique<StandingScript>();
      s->gap = rng.uniform(1.5, 3.0);
      s->yaw_a = pick_sign(rng) * rng.uniform(0.3, 1.0);
      s->yaw_b = pick_sign(rng) * rng.uniform(0.3, 1.0);
      s->y0 = y0;
      script = std::move(s);
      break;
    }
  }
  clip.event_time = spec.kind == ScenarioKind::kStanding ? spec.duration / 2.0 : te;

  const std::int64_t id_a = 1 + static_cast<std::int64_t>(rng.uniform_index(50));
  const std::int64_t id_b = 51 + static_cast<std::int64_t>(rng.uniform_index(50));
  const bool a_first = rng.bernoulli(0.5);
  clip.aggressor_id = a_first ? id_a : id_b;
  clip.victim_id = a_first ? id_b : id_a;

  const Point2 origin{640.0 + rng.uniform(-60.0, 60.0), 360.0 + rng.uniform(-30.0, 30.0)};
  Rng noise(spec.seed, 1);

  const auto n_frames = static_cast<std::int64_t>(std::lround(spec.duration * spec.fps));
  clip.frames.reserve(static_cast<std::size_t>(n_frames));
  FigureState fa, fb;
  for (std::int64_t i = 0; i < n_frames; ++i) {
    const double t = static_cast<double>(i) / spec.fps;
    script->at(t, fa, fb);
    FrameRecord rec;
    rec.frame_index = i;
    rec.timestamp = t;
    for (int who = 0; who < 2; ++who) {
      FigureState f = who == 0 ? fa : fb;
      if (mirror < 0.0) {
        // Reflect the scene; left and right limbs trade places.
        f.hip.x = -f.hip.x;
        f.yaw = -f.yaw;
        auto flip = [](std::optional<Point2> p) {
          if (p) p->x = -p->x;
          return p;
        };
        const auto l = flip(f.left_wrist);
        f.left_wrist = flip(f.right_wrist);
        f.right_wrist = l;
        f.gait = -f.gait;
      }
      Skeleton s = pose_figure(f, spec.scale, origin);
      perturb(s, spec, noise);
      frame_box(s, spec.scale);
      rec.persons.push_back({who == 0 ? clip.aggressor_id : clip.victim_id, s});
    }
    if (!a_first) std::swap(rec.persons[0], rec.persons[1]);
    clip.frames.push_back(std::move(rec));
  }
  return clip;
}

SnatchCheck check_snatch_guarantees(const Clip& clip, double alpha, const FeatureConfig& cfg) {
  const auto tracks = build_tracks(clip.frames);
  const Track* agg = nullptr;
  const Track* vic = nullptr;
  for (const auto& t : tracks) {
    if (t.id.source == clip.aggressor_id && t.id.segment == 0) agg = &t;
    if (t.id.source == clip.victim_id && t.id.segment == 0) vic = &t;
  }
  if (!agg || !vic) throw Error(ErrorCode::kInvalidArgument, "clip lacks its scripted tracks");
  const SmoothingConfig sc{alpha};
  const Track a = smooth_track(*agg, sc);
  const Track b = smooth_track(*vic, sc);
  const auto pair = make_pair_segment(a, b, a.time(0), a.time(a.size() - 1), clip.spec.fps);

  SnatchCheck out;
  const auto reach = reaching(pair, cfg);
  const auto hands = hand_motion(pair.aggressor, cfg);
  out.hand_to_torso_min = reach.hand_to_torso_min.value_or(INFINITY);
  out.fast_hand_pct = hands.fast_pct.value_or(0.0);
  const auto k = argmin_index(reach.hand_to_torso.values);
  out.contact_time = k ? reach.hand_to_torso.times[*k] : NAN;
  out.ok = out.hand_to_torso_min < 0.3 && out.fast_hand_pct > 0.0 && k &&
           std::abs(out.contact_time - clip.event_time) <= 0.3;
  return out;
}

CorpusSpec CorpusSpec::balanced(std::size_t n_per_class, std::uint64_t seed) {
  CorpusSpec c;
  c.n_positive = n_per_class;
  c.n_negative = n_per_class;
  c.seed = seed;
  return c;
}

CorpusSpec CorpusSpec::paper_ratio(std::size_t total, std::uint64_t seed) {
  CorpusSpec c;
  c.n_positive = static_cast<std::size_t>(std::llround(static_cast<double>(total) * 29.0 / 90.0));
  c.n_negative = total - c.n_positive;
  c.seed = seed;
  return c;
}

Corpus generate_corpus(const CorpusSpec& spec) {
  static constexpr ScenarioKind kNegatives[] = {ScenarioKind::kWalkBy, ScenarioKind::kHandshake,
                                                ScenarioKind::kStanding};
  Corpus corpus;
  const std::size_t total = spec.n_positive + spec.n_negative;
  corpus.clips.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Rng meta(spec.seed, i);
    ScenarioSpec s;
    s.kind = i < spec.n_positive ? ScenarioKind::kSnatch : kNegatives[(i - spec.n_positive) % 3];
    s.duration = spec.duration;
    s.fps = spec.fps;
    s.noise_sigma = spec.noise_sigma;
    s.scale = meta.uniform(spec.min_scale, spec.max_scale);
    s.seed = meta.next_u64();
    Clip clip = generate(s);
    char name[32];
    std::snprintf(name, sizeof(name), "clip_%04zu", i);
    clip.name = name;
    corpus.clips.push_back(std::move(clip));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());

  nlohmann::json clips = nlohmann::json::array();
  for (const auto& clip : corpus.clips) {
    const std::string file = clip.name + ".jsonl";
    write_frames_file((fs::path(dir) / file).string(), clip.frames);
    clips.push_back({{"name", clip.name},
                     {"file", file},
                     {"label", clip.label},
                     {"kind", to_string(clip.spec.kind)},
                     {"seed", clip.spec.seed},
                     {"event_time", clip.event_time},
                     {"aggressor_id", clip.aggressor_id},
                     {"victim_id", clip.victim_id},
                     {"fps", clip.spec.fps},
                     {"scale", clip.spec.scale},
                     {"noise_sigma", clip.spec.noise_sigma}});
  }
  nlohmann::json doc{{"clips", clips}};
  write_text_file((fs::path(dir) / "manifest.json").string(), doc.dump(2) + "\n");
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
    std::vector<ManifestEntry> out;
    for (const auto& c : doc.at("clips")) {
      ManifestEntry e;
      e.name = c.at("name").get<std::string>();
      e.file = c.at("file").get<std::string>();
      e.label = c.at("label").get<int>();
      e.kind = c.value("kind", std::string());
      e.seed = c.value("seed", std::uint64_t{0});
      e.event_time = c.at("event_time").get<double>();
      e.aggressor_id = c.value("aggressor_id", std::int64_t{0});
      e.victim_id = c.value("victim_id", std::int64_t{0});
      if (e.label != 0 && e.label != 1) throw Error(ErrorCode::kMalformedRecord, "label must be 0 or 1");
      out.push_back(std::move(e));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, path + ": " + e.what());
  }
}

}  // namespace posewatch
