#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posewatch/core_types.hpp"
#include "posewatch/schema.hpp"

namespace posewatch {

// Thresholds and lags used by the feature extractors. Distances are in
// torso heights, speeds in torso heights per second.
struct FeatureConfig {
  double fast_hand_threshold = 1.5;
  double elbow_flex_threshold_deg = 120.0;
  double close_hand_threshold = 0.4;
  double hand_toward_threshold = 0.7;
  double peak_followup_s = 0.2;
  double post_contact_window_s = 0.4;
  double missing_distance = kDefaultMissingDistance;
  std::size_t min_segment_frames = 3;
};

using Value = std::optional<double>;

struct FeatureSeries {
  std::string name;
  std::vector<double> times;
  std::vector<Value> values;
};

// ---- series helpers ---------------------------------------------------------

// 100 * (#present values above/below threshold) / #present; missing if none present.
Value percent_above(std::span<const Value> values, double threshold);
Value percent_below(std::span<const Value> values, double threshold);
// First index of the max (or min) present value.
std::optional<std::size_t> argmax_index(std::span<const Value> values);
std::optional<std::size_t> argmin_index(std::span<const Value> values);
std::size_t longest_true_run(std::span<const bool> flags);
// values[peak] - values[j] with j the first sample at least `lag` seconds after
// the peak; missing when the segment ends sooner or either value is missing.
Value drop_after_peak(std::span<const double> times, std::span<const Value> values,
                      std::size_t peak, double lag);

// Throws UnknownStatistic for names outside kSeriesStatistics.
struct Aggregate {
  std::string statistic;
  Value value;
};
std::vector<Aggregate> aggregate(std::span<const Value> values,
                                 std::span<const std::string_view> statistics);
Value aggregate_one(std::span<const Value> values, std::string_view statistic);

// ---- geometry ---------------------------------------------------------------

// Intersection over union; 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

// Interior angle at `joint` in degrees, [0, 180]; missing for zero-length limbs.
Value joint_angle_deg(Point2 a, Point2 joint, Point2 b);

// Cosine similarity clamped to [-1, 1]; missing for zero vectors.
Value cosine(Point2 a, Point2 b);

// Unit facing vector: ear-midpoint to nose when the nose and both ears are
// valid, otherwise the shoulder-line normal on the nose side.
std::optional<Point2> facing_direction(const Skeleton& s);

// ---- individual features (operate on the smoothed poses of one track) --------

struct CenterKinematics {
  FeatureSeries velocity;
  FeatureSeries acceleration;
};
// Throws InsufficientSamples for fewer than two samples.
CenterKinematics center_kinematics(const Track& track);

struct HandMotion {
  FeatureSeries velocity;
  FeatureSeries acceleration;
  FeatureSeries jerk;
  Value fast_pct;
  Value time_to_peak;  // frames from segment start
  Value jerk_min;
};
// Throws InsufficientSamples unless a wrist is valid in at least three frames.
HandMotion hand_motion(const Track& track, const FeatureConfig& cfg = {});

struct ArmPosture {
  FeatureSeries extension;
  FeatureSeries elbow_left;
  FeatureSeries elbow_right;
  Value time_to_peak;
  Value retraction;
  Value flex_pct_left;
  Value flex_pct_right;
};
// Throws InsufficientSamples when no frame has a usable shoulder/wrist pair.
ArmPosture arm_posture(const Track& track, const FeatureConfig& cfg = {});

// Relative bbox-area change per second. Throws InsufficientSamples, DegenerateBox.
FeatureSeries bbox_area_rate(const Track& track);

// ---- interaction features (aggressor = A, victim = B) -------------------------

struct DistanceFeatures {
  FeatureSeries distance;
  FeatureSeries rate;
  FeatureSeries iou;
  Value iou_peak;
  Value iou_drop;
};
DistanceFeatures interaction_distance(const PairSegment& pair, const FeatureConfig& cfg = {});

struct RelativeMotion {
  FeatureSeries relative_speed;
  FeatureSeries hand_toward_cos;
  Value hand_toward_pct;
};
RelativeMotion relative_motion(const PairSegment& pair, const FeatureConfig& cfg = {});

struct Reaching {
  FeatureSeries hand_to_torso;
  FeatureSeries hand_to_hip;
  Value hand_to_torso_min;
  Value hand_to_hip_min;
  Value close_hand_pct;
  Value fast_and_close_pct;
  Value fast_and_close_longest;
  Value post_contact_sep_mean;
};
// Throws NoValidJointPairs when no frame pairs a valid A wrist with B's torso.
Reaching reaching(const PairSegment& pair, const FeatureConfig& cfg = {});

struct Facing {
  FeatureSeries a_facing_b;  // +1 when A faces B
  FeatureSeries b_facing_a;  // -1 when B faces A
  FeatureSeries rate;        // victim's facing angular speed, rad/s
};
// Throws FacingUndefined when neither person has a facing estimate in any frame.
Facing facing(const PairSegment& pair);

// ---- segment assembly ---------------------------------------------------------

struct SegmentInfo {
  double start_time = 0.0;
  double end_time = 0.0;
  TrackId aggressor;
  TrackId victim;
};

class FeatureVector {
 public:
  FeatureVector(std::shared_ptr<const FeatureSchema> schema, std::vector<double> values,
                SegmentInfo info = {});

  const FeatureSchema& schema() const { return *schema_; }
  std::shared_ptr<const FeatureSchema> schema_ptr() const { return schema_; }
  std::span<const double> values() const { return values_; }
  const SegmentInfo& info() const { return info_; }
  std::size_t size() const { return values_.size(); }
  // Throws UnknownFeature when the name is not in the schema.
  double at(std::string_view name) const;

 private:
  std::shared_ptr<const FeatureSchema> schema_;
  std::vector<double> values_;
  SegmentInfo info_;
};

// Every catalog feature for the pair with A = pair.aggressor, in
// FeatureSchema::full() order, before the missing-value policy is applied.
std::vector<Value> compute_catalog_features(const PairSegment& pair, const FeatureConfig& cfg = {});

// Full feature vector restricted to `schema`, missing values replaced by the
// per-kind sentinel. Throws SegmentTooShort.
FeatureVector extract_segment(const PairSegment& pair, std::shared_ptr<const FeatureSchema> schema,
                              const FeatureConfig& cfg = {});

}  // namespace posewatch
