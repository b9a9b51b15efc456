#include "posewatch/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "posewatch/error.hpp"

namespace posewatch {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidAlpha, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

double ema_step(double prev, double raw, double alpha) {
  check_alpha(alpha);
  // Same as alpha * raw + (1 - alpha) * prev, but exact when raw == prev.
  return prev + alpha * (raw - prev);
}

SkeletonSmoother::SkeletonSmoother(SmoothingConfig cfg) : alpha_(cfg.alpha) { check_alpha(alpha_); }

Skeleton SkeletonSmoother::push(const Skeleton& raw) {
  Skeleton out = raw;
  if (!started_) {
    state_ = raw;
    started_ = true;
  } else {
    state_.bbox.x1 = ema_step(state_.bbox.x1, raw.bbox.x1, alpha_);
    state_.bbox.y1 = ema_step(state_.bbox.y1, raw.bbox.y1, alpha_);
    state_.bbox.x2 = ema_step(state_.bbox.x2, raw.bbox.x2, alpha_);
    state_.bbox.y2 = ema_step(state_.bbox.y2, raw.bbox.y2, alpha_);
  }
  out.bbox = state_.bbox;

  for (std::size_t j = 0; j < kNumKeypoints; ++j) {
    const Keypoint& in = raw.keypoints[j];
    Keypoint& st = state_.keypoints[j];
    if (in.valid()) {
      if (!seeded_[j]) {
        st.x = in.x;
        st.y = in.y;
        seeded_[j] = true;
      } else {
        st.x = ema_step(st.x, in.x, alpha_);
        st.y = ema_step(st.y, in.y, alpha_);
      }
    }
    // Unseeded invalid joints pass the raw position through.
    if (seeded_[j]) {
      out.keypoints[j].x = st.x;
      out.keypoints[j].y = st.y;
    }
    out.keypoints[j].confidence = in.confidence;
  }
  return out;
}

Track smooth_track(Track track, const SmoothingConfig& cfg) {
  check_alpha(cfg.alpha);
  if (track.empty()) {
    throw Error(ErrorCode::kEmptyTrack, "track " + track.id.to_string() + " has no samples");
  }
  SkeletonSmoother smoother(cfg);
  track.smoothed.clear();
  track.smoothed.reserve(track.samples.size());
  for (const auto& sample : track.samples) {
    track.smoothed.push_back(smoother.push(sample.skeleton));
  }
  return track;
}

std::optional<Point2> joint_midpoint(const Skeleton& s, Joint a, Joint b) {
  const Keypoint& ka = s[a];
  const Keypoint& kb = s[b];
  if (ka.valid() && kb.valid()) return midpoint(ka.position(), kb.position());
  if (ka.valid()) return ka.position();
  if (kb.valid()) return kb.position();
  return std::nullopt;
}

std::optional<Point2> shoulder_center(const Skeleton& s) {
  return joint_midpoint(s, Joint::kLeftShoulder, Joint::kRightShoulder);
}

std::optional<Point2> hip_center(const Skeleton& s) {
  return joint_midpoint(s, Joint::kLeftHip, Joint::kRightHip);
}

std::optional<Point2> body_center(const Skeleton& s) {
  const auto sh = shoulder_center(s);
  const auto hp = hip_center(s);
  if (sh && hp) return midpoint(*sh, *hp);
  if (sh) return sh;
  return hp;
}

std::optional<double> torso_height(const Skeleton& s) {
  const auto sh = shoulder_center(s);
  const auto hp = hip_center(s);
  if (!sh || !hp) return std::nullopt;
  return distance(*sh, *hp);
}

std::optional<double> body_scale(const Skeleton& s) {
  const auto torso = torso_height(s);
  if (!torso) return std::nullopt;
  const double scale = std::max(*torso, kScaleFloorFraction * s.bbox.height());
  if (!(scale > 0.0)) return std::nullopt;
  return scale;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::optional<double> mean_normalized_motion(const Track& track) {
  double sum = 0.0;
  int steps = 0;
  for (std::size_t i = 1; i < track.size(); ++i) {
    const auto c0 = body_center(track.pose(i - 1));
    const auto c1 = body_center(track.pose(i));
    const auto scale = body_scale(track.pose(i));
    const double dt = track.time(i) - track.time(i - 1);
    if (!c0 || !c1 || !scale || !(dt > 0.0)) continue;
    sum += distance(*c1, *c0) / *scale / dt;
    ++steps;
  }
  if (steps == 0) return std::nullopt;
  return sum / steps;
}

std::vector<RoleProbability> aggressor_probabilities(std::span<const Track> tracks,
                                                     double window) {
  double latest = -std::numeric_limits<double>::infinity();
  for (const auto& t : tracks) {
    if (!t.empty()) latest = std::max(latest, t.samples.back().timestamp);
  }

  std::vector<RoleProbability> roles;
  std::vector<double> scores;
  bool any = false;
  for (const auto& t : tracks) {
    const auto motion = mean_normalized_motion(t.slice(latest - window, latest));
    any = any || motion.has_value();
    roles.push_back({t.id, motion.value_or(0.0), 0.0});
    scores.push_back(motion.value_or(0.0));
  }
  if (!any) {
    throw Error(ErrorCode::kInsufficientHistory,
                "no track has two usable samples in the role window");
  }
  const auto probs = softmax(scores);
  for (std::size_t i = 0; i < roles.size(); ++i) roles[i].p_aggressor = probs[i];
  return roles;
}

std::size_t most_likely_aggressor(std::span<const RoleProbability> roles) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < roles.size(); ++i) {
    const auto& r = roles[i];
    const auto& b = roles[best];
    if (r.mean_motion > b.mean_motion || (r.mean_motion == b.mean_motion && r.track < b.track)) {
      best = i;
    }
  }
  return best;
}

}  // namespace posewatch
