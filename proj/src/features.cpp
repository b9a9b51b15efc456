#include "posewatch/features.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "posewatch/error.hpp"
#include "posewatch/preprocess.hpp"

namespace posewatch {

namespace {

// Slack when comparing timestamps against a lag.
constexpr double kTimeEps = 1e-6;

constexpr std::array<Joint, 2> kWrists = {Joint::kLeftWrist, Joint::kRightWrist};

struct Arm {
  Joint shoulder;
  Joint elbow;
  Joint wrist;
};
constexpr std::array<Arm, 2> kArms = {
    Arm{Joint::kLeftShoulder, Joint::kLeftElbow, Joint::kLeftWrist},
    Arm{Joint::kRightShoulder, Joint::kRightElbow, Joint::kRightWrist},
};

FeatureSeries empty_series(std::string name, const Track& track) {
  FeatureSeries s;
  s.name = std::move(name);
  s.times.reserve(track.size());
  for (std::size_t i = 0; i < track.size(); ++i) s.times.push_back(track.time(i));
  s.values.assign(track.size(), std::nullopt);
  return s;
}

// Backward difference of a series divided by the sample spacing.
void differentiate(const FeatureSeries& in, FeatureSeries& out) {
  for (std::size_t i = 1; i < in.values.size(); ++i) {
    if (in.values[i] && in.values[i - 1]) {
      out.values[i] = (*in.values[i] - *in.values[i - 1]) / (in.times[i] - in.times[i - 1]);
    }
  }
}

std::size_t count_present(std::span<const Value> values) {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const Value& v) { return v.has_value(); }));
}

Value min_present(std::span<const Value> values) {
  Value best;
  for (const auto& v : values) {
    if (v && (!best || *v < *best)) best = v;
  }
  return best;
}

CenterKinematics center_kinematics_impl(const Track& track) {
  CenterKinematics out{empty_series("velocity", track), empty_series("acceleration", track)};
  for (std::size_t i = 1; i < track.size(); ++i) {
    const auto c0 = body_center(track.pose(i - 1));
    const auto c1 = body_center(track.pose(i));
    const auto scale = body_scale(track.pose(i));
    if (!c0 || !c1 || !scale) continue;
    out.velocity.values[i] = distance(*c1, *c0) / *scale / (track.time(i) - track.time(i - 1));
  }
  differentiate(out.velocity, out.acceleration);
  return out;
}

HandMotion hand_motion_impl(const Track& track, const FeatureConfig& cfg) {
  HandMotion out{empty_series("handVelocity", track), empty_series("handAcceleration", track),
                 empty_series("handJerk", track), {}, {}, {}};
  for (std::size_t i = 1; i < track.size(); ++i) {
    const Skeleton& prev = track.pose(i - 1);
    const Skeleton& cur = track.pose(i);
    const auto scale = body_scale(cur);
    if (!scale) continue;
    const double dt = track.time(i) - track.time(i - 1);
    Value fastest;
    for (Joint w : kWrists) {
      if (!prev[w].valid() || !cur[w].valid()) continue;
      const double speed = distance(cur[w].position(), prev[w].position()) / *scale / dt;
      if (!fastest || speed > *fastest) fastest = speed;
    }
    out.velocity.values[i] = fastest;
  }
  differentiate(out.velocity, out.acceleration);
  differentiate(out.acceleration, out.jerk);
  out.fast_pct = percent_above(out.velocity.values, cfg.fast_hand_threshold);
  if (auto peak = argmax_index(out.velocity.values)) out.time_to_peak = static_cast<double>(*peak);
  out.jerk_min = min_present(out.jerk.values);
  return out;
}

ArmPosture arm_posture_impl(const Track& track, const FeatureConfig& cfg) {
  ArmPosture out{empty_series("armExtension", track), empty_series("elbowAngleL", track),
                 empty_series("elbowAngleR", track), {}, {}, {}, {}};
  for (std::size_t i = 0; i < track.size(); ++i) {
    const Skeleton& s = track.pose(i);
    const auto scale = body_scale(s);
    Value reach;
    for (std::size_t side = 0; side < kArms.size(); ++side) {
      const Arm& arm = kArms[side];
      const Keypoint& sh = s[arm.shoulder];
      const Keypoint& el = s[arm.elbow];
      const Keypoint& wr = s[arm.wrist];
      if (scale && sh.valid() && wr.valid()) {
        const double ext = distance(wr.position(), sh.position()) / *scale;
        if (!reach || ext > *reach) reach = ext;
      }
      if (sh.valid() && el.valid() && wr.valid()) {
        auto& series = side == 0 ? out.elbow_left : out.elbow_right;
        series.values[i] = joint_angle_deg(sh.position(), el.position(), wr.position());
      }
    }
    out.extension.values[i] = reach;
  }
  if (auto peak = argmax_index(out.extension.values)) {
    out.time_to_peak = static_cast<double>(*peak);
    out.retraction = drop_after_peak(out.extension.times, out.extension.values, *peak,
                                     cfg.peak_followup_s);
  }
  out.flex_pct_left = percent_below(out.elbow_left.values, cfg.elbow_flex_threshold_deg);
  out.flex_pct_right = percent_below(out.elbow_right.values, cfg.elbow_flex_threshold_deg);
  return out;
}

FeatureSeries bbox_area_rate_impl(const Track& track, bool strict) {
  auto out = empty_series("bboxAreaRate", track);
  for (std::size_t i = 1; i < track.size(); ++i) {
    const double a0 = track.pose(i - 1).bbox.area();
    const double a1 = track.pose(i).bbox.area();
    if (!(a0 > 0.0)) {
      if (strict) {
        throw Error(ErrorCode::kDegenerateBox,
                    "zero-area box at sample " + std::to_string(i - 1) + " of track " +
                        track.id.to_string());
      }
      continue;
    }
    out.values[i] = (a1 - a0) / (a0 * (track.time(i) - track.time(i - 1)));
  }
  return out;
}

// Mean of the two persons' scales; missing if either is missing.
Value pair_scale(const Skeleton& a, const Skeleton& b) {
  const auto sa = body_scale(a);
  const auto sb = body_scale(b);
  if (!sa || !sb) return std::nullopt;
  return (*sa + *sb) / 2.0;
}

DistanceFeatures interaction_distance_impl(const PairSegment& pair, const FeatureConfig& cfg) {
  const Track& a = pair.aggressor;
  const Track& b = pair.victim;
  DistanceFeatures out{empty_series("distance", a), empty_series("distanceRate", a),
                       empty_series("iou", a), {}, {}};
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const Skeleton& sa = a.pose(i);
    const Skeleton& sb = b.pose(i);
    out.iou.values[i] = iou(sa.bbox, sb.bbox);
    const auto ca = body_center(sa);
    const auto cb = body_center(sb);
    const auto scale = pair_scale(sa, sb);
    if (ca && cb && scale) out.distance.values[i] = distance(*ca, *cb) / *scale;
  }
  differentiate(out.distance, out.rate);
  if (auto peak = argmax_index(out.iou.values)) {
    out.iou_peak = out.iou.values[*peak];
    out.iou_drop = drop_after_peak(out.iou.times, out.iou.values, *peak, cfg.peak_followup_s);
  }
  return out;
}

RelativeMotion relative_motion_impl(const PairSegment& pair, const FeatureConfig& cfg) {
  const Track& a = pair.aggressor;
  const Track& b = pair.victim;
  RelativeMotion out{empty_series("relativeSpeed", a), empty_series("handTowardCos", a), {}};
  for (std::size_t i = 1; i < pair.size(); ++i) {
    const Skeleton& a0 = a.pose(i - 1);
    const Skeleton& a1 = a.pose(i);
    const Skeleton& b0 = b.pose(i - 1);
    const Skeleton& b1 = b.pose(i);
    const double dt = a.time(i) - a.time(i - 1);
    const auto ca0 = body_center(a0);
    const auto ca1 = body_center(a1);
    const auto cb0 = body_center(b0);
    const auto cb1 = body_center(b1);
    const auto scale = pair_scale(a1, b1);
    if (ca0 && ca1 && cb0 && cb1 && scale) {
      const Point2 r1 = *ca1 - *cb1;
      const Point2 r0 = *ca0 - *cb0;
      out.relative_speed.values[i] = norm(r1 - r0) / *scale / dt;
    }

    // Faster of A's wrists; the left wins ties.
    std::optional<Point2> hand_velocity;
    double best_speed = -1.0;
    for (Joint w : kWrists) {
      if (!a0[w].valid() || !a1[w].valid()) continue;
      const Point2 v = a1[w].position() - a0[w].position();
      const double speed = norm(v);
      if (speed > best_speed) {
        best_speed = speed;
        hand_velocity = v;
      }
    }
    if (hand_velocity && ca1 && cb1) {
      out.hand_toward_cos.values[i] = cosine(*hand_velocity, *cb1 - *ca1);
    }
  }
  out.hand_toward_pct = percent_above(out.hand_toward_cos.values, cfg.hand_toward_threshold);
  return out;
}

Reaching reaching_impl(const PairSegment& pair, const FeatureConfig& cfg,
                       std::span<const Value> hand_velocity, std::span<const Value> distance_series) {
  const Track& a = pair.aggressor;
  const Track& b = pair.victim;
  Reaching out{empty_series("handToTorso", a), empty_series("handToHip", a), {}, {}, {}, {}, {}, {}};
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const Skeleton& sa = a.pose(i);
    const Skeleton& sb = b.pose(i);
    const auto scale = body_scale(sb);
    if (!scale) continue;
    const auto torso = body_center(sb);
    const auto hips = hip_center(sb);
    Value to_torso;
    Value to_hip;
    for (Joint w : kWrists) {
      if (!sa[w].valid()) continue;
      const Point2 p = sa[w].position();
      if (torso) {
        const double d = distance(p, *torso) / *scale;
        if (!to_torso || d < *to_torso) to_torso = d;
      }
      if (hips) {
        const double d = distance(p, *hips) / *scale;
        if (!to_hip || d < *to_hip) to_hip = d;
      }
    }
    out.hand_to_torso.values[i] = to_torso;
    out.hand_to_hip.values[i] = to_hip;
  }
  out.hand_to_torso_min = min_present(out.hand_to_torso.values);
  out.hand_to_hip_min = min_present(out.hand_to_hip.values);
  out.close_hand_pct = percent_below(out.hand_to_torso.values, cfg.close_hand_threshold);

  // std::vector<bool> cannot back a span.
  const auto flags = std::make_unique<bool[]>(pair.size());
  std::size_t both = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const auto& hv = hand_velocity[i];
    const auto& ht = out.hand_to_torso.values[i];
    if (!hv || !ht) continue;
    ++both;
    flags[i] = *hv > cfg.fast_hand_threshold && *ht < cfg.close_hand_threshold;
    if (flags[i]) ++hits;
  }
  if (both > 0) {
    out.fast_and_close_pct = 100.0 * static_cast<double>(hits) / static_cast<double>(both);
    out.fast_and_close_longest =
        static_cast<double>(longest_true_run(std::span<const bool>(flags.get(), pair.size())));
  }

  if (auto contact = argmin_index(out.hand_to_torso.values)) {
    const double t_end = a.time(*contact) + cfg.post_contact_window_s + kTimeEps;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t j = *contact; j < pair.size() && a.time(j) <= t_end; ++j) {
      if (distance_series[j]) {
        sum += *distance_series[j];
        ++n;
      }
    }
    if (n > 0) out.post_contact_sep_mean = sum / static_cast<double>(n);
  }
  return out;
}

Facing facing_impl(const PairSegment& pair) {
  const Track& a = pair.aggressor;
  const Track& b = pair.victim;
  Facing out{empty_series("AfacingToB", a), empty_series("BfacingToA", a),
             empty_series("facingRate", a)};
  std::optional<Point2> prev_b;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const Skeleton& sa = a.pose(i);
    const Skeleton& sb = b.pose(i);
    const auto fa = facing_direction(sa);
    const auto fb = facing_direction(sb);
    const auto ca = body_center(sa);
    const auto cb = body_center(sb);
    if (ca && cb) {
      const Point2 a_to_b = *cb - *ca;
      if (fa) out.a_facing_b.values[i] = cosine(*fa, a_to_b);
      // Measured against A->B so that -1 means B looks at A.
      if (fb) out.b_facing_a.values[i] = cosine(*fb, a_to_b);
    }
    if (i > 0 && fb && prev_b) {
      const double turn = std::atan2(cross(*prev_b, *fb), dot(*prev_b, *fb));
      out.rate.values[i] = std::abs(turn) / (b.time(i) - b.time(i - 1));
    }
    prev_b = fb;
  }
  return out;
}

void require_samples(const Track& track, std::size_t n, const char* op) {
  if (track.size() < n) {
    throw Error(ErrorCode::kInsufficientSamples,
                std::string(op) + " needs " + std::to_string(n) + " samples, track " +
                    track.id.to_string() + " has " + std::to_string(track.size()));
  }
}

}  // namespace

// ---- series helpers ---------------------------------------------------------

Value percent_above(std::span<const Value> values, double threshold) {
  std::size_t present = 0;
  std::size_t hits = 0;
  for (const auto& v : values) {
    if (!v) continue;
    ++present;
    if (*v > threshold) ++hits;
  }
  if (present == 0) return std::nullopt;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(present);
}

Value percent_below(std::span<const Value> values, double threshold) {
  std::size_t present = 0;
  std::size_t hits = 0;
  for (const auto& v : values) {
    if (!v) continue;
    ++present;
    if (*v < threshold) ++hits;
  }
  if (present == 0) return std::nullopt;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(present);
}

std::optional<std::size_t> argmax_index(std::span<const Value> values) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && (!best || *values[i] > *values[*best])) best = i;
  }
  return best;
}

std::optional<std::size_t> argmin_index(std::span<const Value> values) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && (!best || *values[i] < *values[*best])) best = i;
  }
  return best;
}

std::size_t longest_true_run(std::span<const bool> flags) {
  std::size_t best = 0;
  std::size_t run = 0;
  for (bool f : flags) {
    run = f ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

Value drop_after_peak(std::span<const double> times, std::span<const Value> values,
                      std::size_t peak, double lag) {
  if (peak >= values.size() || !values[peak]) return std::nullopt;
  const double target = times[peak] + lag - kTimeEps;
  for (std::size_t j = peak + 1; j < values.size(); ++j) {
    if (times[j] >= target) {
      if (!values[j]) return std::nullopt;
      return *values[peak] - *values[j];
    }
  }
  return std::nullopt;
}

Value aggregate_one(std::span<const Value> values, std::string_view statistic) {
  if (std::find(kSeriesStatistics.begin(), kSeriesStatistics.end(), statistic) ==
      kSeriesStatistics.end()) {
    throw Error(ErrorCode::kUnknownStatistic, "'" + std::string(statistic) + "'");
  }
  std::vector<double> present;
  present.reserve(values.size());
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) return std::nullopt;

  if (statistic == "mean") {
    double sum = 0.0;
    for (double v : present) sum += v;
    return sum / static_cast<double>(present.size());
  }
  if (statistic == "max") return *std::max_element(present.begin(), present.end());
  if (statistic == "min") return *std::min_element(present.begin(), present.end());

  std::sort(present.begin(), present.end());
  const std::size_t n = present.size();
  if (statistic == "median") {
    return n % 2 == 1 ? present[n / 2] : (present[n / 2 - 1] + present[n / 2]) / 2.0;
  }
  // p95, nearest rank: ceil(0.95 n), 1-based.
  const std::size_t rank = (95 * n + 99) / 100;
  return present[rank - 1];
}

std::vector<Aggregate> aggregate(std::span<const Value> values,
                                 std::span<const std::string_view> statistics) {
  std::vector<Aggregate> out;
  out.reserve(statistics.size());
  for (auto stat : statistics) out.push_back({std::string(stat), aggregate_one(values, stat)});
  return out;
}

// ---- geometry ---------------------------------------------------------------

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = iw > 0.0 && ih > 0.0 ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Value joint_angle_deg(Point2 a, Point2 joint, Point2 b) {
  const Point2 u = a - joint;
  const Point2 v = b - joint;
  if (norm(u) == 0.0 || norm(v) == 0.0) return std::nullopt;
  return std::atan2(std::abs(cross(u, v)), dot(u, v)) * 180.0 / std::numbers::pi;
}

Value cosine(Point2 a, Point2 b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

std::optional<Point2> facing_direction(const Skeleton& s) {
  const Keypoint& nose = s[Joint::kNose];
  if (!nose.valid()) return std::nullopt;
  const Keypoint& le = s[Joint::kLeftEar];
  const Keypoint& re = s[Joint::kRightEar];
  if (le.valid() && re.valid()) {
    const Point2 v = nose.position() - midpoint(le.position(), re.position());
    const double n = norm(v);
    if (n > 0.0) return Point2{v.x / n, v.y / n};
  }
  const Keypoint& ls = s[Joint::kLeftShoulder];
  const Keypoint& rs = s[Joint::kRightShoulder];
  if (ls.valid() && rs.valid()) {
    const Point2 d = rs.position() - ls.position();
    Point2 normal{-d.y, d.x};
    const double side = dot(normal, nose.position() - midpoint(ls.position(), rs.position()));
    const double n = norm(normal);
    if (side == 0.0 || n == 0.0) return std::nullopt;
    if (side < 0.0) normal = Point2{-normal.x, -normal.y};
    return Point2{normal.x / n, normal.y / n};
  }
  return std::nullopt;
}

// ---- public ops ---------------------------------------------------------------

CenterKinematics center_kinematics(const Track& track) {
  require_samples(track, 2, "center_kinematics");
  return center_kinematics_impl(track);
}

HandMotion hand_motion(const Track& track, const FeatureConfig& cfg) {
  std::size_t frames_with_wrist = 0;
  for (std::size_t i = 0; i < track.size(); ++i) {
    const Skeleton& s = track.pose(i);
    if (s[Joint::kLeftWrist].valid() || s[Joint::kRightWrist].valid()) ++frames_with_wrist;
  }
  if (frames_with_wrist < 3) {
    throw Error(ErrorCode::kInsufficientSamples,
                "hand_motion needs a valid wrist in 3 frames, got " +
                    std::to_string(frames_with_wrist));
  }
  return hand_motion_impl(track, cfg);
}

ArmPosture arm_posture(const Track& track, const FeatureConfig& cfg) {
  require_samples(track, 1, "arm_posture");
  auto out = arm_posture_impl(track, cfg);
  if (count_present(out.extension.values) == 0) {
    throw Error(ErrorCode::kInsufficientSamples, "no frame with a usable shoulder/wrist pair");
  }
  return out;
}

FeatureSeries bbox_area_rate(const Track& track) {
  require_samples(track, 2, "bbox_area_rate");
  return bbox_area_rate_impl(track, true);
}

DistanceFeatures interaction_distance(const PairSegment& pair, const FeatureConfig& cfg) {
  if (pair.size() == 0) throw Error(ErrorCode::kNoTemporalOverlap, "empty pair segment");
  return interaction_distance_impl(pair, cfg);
}

RelativeMotion relative_motion(const PairSegment& pair, const FeatureConfig& cfg) {
  if (pair.size() == 0) throw Error(ErrorCode::kNoTemporalOverlap, "empty pair segment");
  return relative_motion_impl(pair, cfg);
}

Reaching reaching(const PairSegment& pair, const FeatureConfig& cfg) {
  if (pair.size() == 0) throw Error(ErrorCode::kNoTemporalOverlap, "empty pair segment");
  const auto hands = hand_motion_impl(pair.aggressor, cfg);
  const auto dist = interaction_distance_impl(pair, cfg);
  auto out = reaching_impl(pair, cfg, hands.velocity.values, dist.distance.values);
  if (count_present(out.hand_to_torso.values) == 0 && count_present(out.hand_to_hip.values) == 0) {
    throw Error(ErrorCode::kNoValidJointPairs,
                "no frame pairs a valid aggressor wrist with the victim's torso");
  }
  return out;
}

Facing facing(const PairSegment& pair) {
  if (pair.size() == 0) throw Error(ErrorCode::kNoTemporalOverlap, "empty pair segment");
  auto out = facing_impl(pair);
  if (count_present(out.a_facing_b.values) == 0 && count_present(out.b_facing_a.values) == 0) {
    throw Error(ErrorCode::kFacingUndefined, "no frame has a facing estimate");
  }
  return out;
}

// ---- segment assembly ---------------------------------------------------------

FeatureVector::FeatureVector(std::shared_ptr<const FeatureSchema> schema, std::vector<double> values,
                             SegmentInfo info)
    : schema_(std::move(schema)), values_(std::move(values)), info_(info) {
  if (!schema_ || schema_->size() != values_.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "value count does not match schema");
  }
}

double FeatureVector::at(std::string_view name) const {
  const auto idx = schema_->index_of(canonical_feature_name(name));
  if (!idx) throw Error(ErrorCode::kUnknownFeature, "'" + std::string(name) + "' not in schema");
  return values_[*idx];
}

std::vector<Value> compute_catalog_features(const PairSegment& pair, const FeatureConfig& cfg) {
  const Track& a = pair.aggressor;
  const auto center = center_kinematics_impl(a);
  const auto hands = hand_motion_impl(a, cfg);
  const auto arms = arm_posture_impl(a, cfg);
  const auto area = bbox_area_rate_impl(a, false);
  const auto dist = interaction_distance_impl(pair, cfg);
  const auto rel = relative_motion_impl(pair, cfg);
  const auto reach = reaching_impl(pair, cfg, hands.velocity.values, dist.distance.values);
  const auto face = facing_impl(pair);

  // Must follow kSeriesNames.
  const std::array<const FeatureSeries*, kSeriesNames.size()> series = {
      &center.velocity,     &center.acceleration, &hands.velocity,    &hands.acceleration,
      &hands.jerk,          &arms.extension,      &arms.elbow_left,   &arms.elbow_right,
      &area,                &dist.distance,       &dist.rate,         &dist.iou,
      &rel.relative_speed,  &rel.hand_toward_cos, &reach.hand_to_torso, &reach.hand_to_hip,
      &face.a_facing_b,     &face.b_facing_a,     &face.rate,
  };
  // Must follow kScalarNames.
  const std::array<Value, kScalarNames.size()> scalars = {
      hands.fast_pct,         hands.time_to_peak,       hands.jerk_min,
      arms.time_to_peak,      arms.retraction,          arms.flex_pct_left,
      arms.flex_pct_right,    dist.iou_peak,            dist.iou_drop,
      rel.hand_toward_pct,    reach.hand_to_torso_min,  reach.close_hand_pct,
      reach.hand_to_hip_min,  reach.fast_and_close_pct, reach.fast_and_close_longest,
      reach.post_contact_sep_mean,
  };

  std::vector<Value> out;
  out.reserve(series.size() * kSeriesStatistics.size() + scalars.size());
  for (const FeatureSeries* s : series) {
    for (auto stat : kSeriesStatistics) out.push_back(aggregate_one(s->values, stat));
  }
  out.insert(out.end(), scalars.begin(), scalars.end());
  return out;
}

FeatureVector extract_segment(const PairSegment& pair, std::shared_ptr<const FeatureSchema> schema,
                              const FeatureConfig& cfg) {
  if (pair.size() < std::max<std::size_t>(cfg.min_segment_frames, 2)) {
    throw Error(ErrorCode::kSegmentTooShort,
                std::to_string(pair.size()) + " frames, need " +
                    std::to_string(std::max<std::size_t>(cfg.min_segment_frames, 2)));
  }
  const auto raw = compute_catalog_features(pair, cfg);
  const auto& catalog = FeatureSchema::full().names();
  std::vector<double> values;
  values.reserve(schema->size());
  for (std::size_t idx : schema->catalog_indices()) {
    const Value& v = raw[idx];
    values.push_back(v ? *v : missing_sentinel(catalog[idx], cfg.missing_distance));
  }
  SegmentInfo info{pair.start_time(), pair.end_time(), pair.aggressor.id, pair.victim.id};
  return FeatureVector(std::move(schema), std::move(values), info);
}

}  // namespace posewatch
