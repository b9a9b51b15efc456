#pragma once

#include <optional>
#include <span>
#include <vector>

#include "posewatch/core_types.hpp"

namespace posewatch {

struct SmoothingConfig {
  double alpha = 0.6;
};

// alpha * raw + (1 - alpha) * prev. Throws InvalidAlpha unless 0 < alpha < 1.
double ema_step(double prev, double raw, double alpha);

// Exponential smoothing of every keypoint coordinate and bbox corner.
// A joint's filter state is seeded by its first valid observation; invalid
// observations leave the state untouched, and the output keypoint carries the
// last smoothed position with the raw (sub-threshold) confidence.
// Throws EmptyTrack, InvalidAlpha.
Track smooth_track(Track track, const SmoothingConfig& cfg);

// Incremental form of smooth_track for streaming use; feeding the same
// skeletons yields bit-identical output.
class SkeletonSmoother {
 public:
  explicit SkeletonSmoother(SmoothingConfig cfg);
  Skeleton push(const Skeleton& raw);

 private:
  double alpha_;
  bool started_ = false;
  std::array<bool, kNumKeypoints> seeded_{};
  Skeleton state_;
};

// Midpoint of the valid keypoints among {a, b}; the lone valid one when only
// one is usable.
std::optional<Point2> joint_midpoint(const Skeleton& s, Joint a, Joint b);

std::optional<Point2> shoulder_center(const Skeleton& s);
std::optional<Point2> hip_center(const Skeleton& s);

// Mean of the available shoulder and hip centers.
std::optional<Point2> body_center(const Skeleton& s);

// Shoulder-center to hip-center distance; missing unless at least one
// shoulder and one hip are valid.
std::optional<double> torso_height(const Skeleton& s);

// Fraction of the bbox height used as a lower bound on the torso scale.
inline constexpr double kScaleFloorFraction = 0.05;

// max(torso_height, 0.05 * bbox height); missing when the torso is missing or
// the result is not positive.
std::optional<double> body_scale(const Skeleton& s);

struct RoleProbability {
  TrackId track;
  double mean_motion = 0.0;  // torso-heights per second
  double p_aggressor = 0.0;
};

// Numerically stable softmax at temperature 1.
std::vector<double> softmax(std::span<const double> scores);

// Mean per-step displacement of the body center over the track, in
// torso-heights per second. Missing when fewer than two usable samples.
std::optional<double> mean_normalized_motion(const Track& track);

// Softmax over per-track mean motion within the trailing `window` seconds
// (measured back from the latest timestamp over all tracks). Tracks with too
// little history score 0 motion. Throws InsufficientHistory when no track has
// two usable samples in the window.
std::vector<RoleProbability> aggressor_probabilities(std::span<const Track> tracks,
                                                     double window);

// Index of the most probable aggressor; ties go to the lower track id.
std::size_t most_likely_aggressor(std::span<const RoleProbability> roles);

}  // namespace posewatch
