#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace posewatch {

inline constexpr std::size_t kNumKeypoints = 17;

// Keypoints at or above this confidence carry positional meaning.
inline constexpr double kValidConfidence = 0.3;

// COCO-17 ordering.
enum class Joint : std::size_t {
  kNose = 0,
  kLeftEye = 1,
  kRightEye = 2,
  kLeftEar = 3,
  kRightEar = 4,
  kLeftShoulder = 5,
  kRightShoulder = 6,
  kLeftElbow = 7,
  kRightElbow = 8,
  kLeftWrist = 9,
  kRightWrist = 10,
  kLeftHip = 11,
  kRightHip = 12,
  kLeftKnee = 13,
  kRightKnee = 14,
  kLeftAnkle = 15,
  kRightAnkle = 16,
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 midpoint(Point2 a, Point2 b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

// Axis-aligned rectangle in pixels, (x1, y1) top-left.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;

  bool valid() const { return confidence >= kValidConfidence; }
  Point2 position() const { return {x, y}; }
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct Skeleton {
  std::array<Keypoint, kNumKeypoints> keypoints{};
  BBox bbox;

  const Keypoint& operator[](Joint j) const { return keypoints[static_cast<std::size_t>(j)]; }
  Keypoint& operator[](Joint j) { return keypoints[static_cast<std::size_t>(j)]; }
  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

struct PersonObservation {
  std::int64_t track_id = 0;
  Skeleton skeleton;
  friend bool operator==(const PersonObservation&, const PersonObservation&) = default;
};

struct FrameRecord {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  std::vector<PersonObservation> persons;
  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

// Upstream id plus a split counter; a temporal gap bumps `segment`.
// Printed as "7" for the first segment and "7.1", "7.2", ... afterwards.
struct TrackId {
  std::int64_t source = 0;
  int segment = 0;

  std::string to_string() const;
  friend auto operator<=>(const TrackId&, const TrackId&) = default;
};

struct TimedSkeleton {
  double timestamp = 0.0;
  std::int64_t frame_index = 0;
  Skeleton skeleton;
};

struct Track {
  TrackId id;
  std::vector<TimedSkeleton> samples;
  // Filled by smooth_track; parallel to samples.
  std::vector<Skeleton> smoothed;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double time(std::size_t i) const { return samples[i].timestamp; }
  // Smoothed pose when available, raw pose otherwise.
  const Skeleton& pose(std::size_t i) const {
    return smoothed.size() == samples.size() ? smoothed[i] : samples[i].skeleton;
  }
  // Samples with timestamp in [t0, t1].
  Track slice(double t0, double t1) const;
};

// Two time-aligned track slices: aggressor.time(i) == victim.time(i) for all i.
struct PairSegment {
  Track aggressor;
  Track victim;
  double fps = 30.0;

  std::size_t size() const { return aggressor.size(); }
  double start_time() const { return aggressor.time(0); }
  double end_time() const { return aggressor.time(aggressor.size() - 1); }
  PairSegment swapped() const { return {victim, aggressor, fps}; }
};

// Intersects the two tracks on equal timestamps inside [t0, t1].
// Throws NoTemporalOverlap when fewer than two common samples remain.
PairSegment make_pair_segment(const Track& aggressor, const Track& victim, double t0,
                              double t1, double fps);

// Returns the record when every invariant holds. Confidences within 1e-9 of
// [0, 1] are clamped; anything else malformed throws MalformedRecord.
// `previous_timestamp` enables the strict-monotonicity check across a stream.
FrameRecord validate_frame(FrameRecord record,
                           std::optional<double> previous_timestamp = std::nullopt);

inline constexpr int kDefaultMaxGapFrames = 15;

// One Track per upstream id; an absence longer than `max_gap` frames starts a
// new Track with the next segment suffix. Tracks come back sorted by id.
std::vector<Track> build_tracks(std::span<const FrameRecord> frames,
                                int max_gap = kDefaultMaxGapFrames);

}  // namespace posewatch
