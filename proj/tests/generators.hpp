#pragma once

// Random inputs for the property tests. Everything is driven by an explicit
// Rng so failures reproduce from the printed seed.

#include <cstdint>
#include <vector>

#include "posewatch/core_types.hpp"
#include "posewatch/rng.hpp"

namespace gen {

using posewatch::BBox;
using posewatch::FrameRecord;
using posewatch::Keypoint;
using posewatch::PairSegment;
using posewatch::Rng;
using posewatch::Skeleton;
using posewatch::TimedSkeleton;
using posewatch::Track;
using posewatch::TrackId;

inline BBox box(Rng& rng, double extent = 100.0) {
  const double x1 = rng.uniform(-extent, extent);
  const double y1 = rng.uniform(-extent, extent);
  return {x1, y1, x1 + rng.uniform(0.5, extent), y1 + rng.uniform(0.5, extent)};
}

// Loosely human layout around `center` with per-joint jitter. `invalid_rate`
// is the chance that a keypoint drops below the confidence threshold.
inline Skeleton skeleton(Rng& rng, posewatch::Point2 center, double size, double invalid_rate = 0.1) {
  static constexpr double kLayout[17][2] = {
      {0.0, -1.4},  {0.05, -1.45}, {-0.05, -1.45}, {0.1, -1.4},  {-0.1, -1.4}, {0.2, -1.0},
      {-0.2, -1.0}, {0.3, -0.6},   {-0.3, -0.6},   {0.35, -0.2}, {-0.35, -0.2}, {0.12, 0.0},
      {-0.12, 0.0}, {0.12, 0.9},   {-0.12, 0.9},   {0.12, 1.8},  {-0.12, 1.8},
  };
  Skeleton s;
  double x1 = 1e300, y1 = 1e300, x2 = -1e300, y2 = -1e300;
  for (std::size_t j = 0; j < 17; ++j) {
    Keypoint& kp = s.keypoints[j];
    kp.x = center.x + size * (kLayout[j][0] + rng.uniform(-0.25, 0.25));
    kp.y = center.y + size * (kLayout[j][1] + rng.uniform(-0.25, 0.25));
    kp.confidence = rng.bernoulli(invalid_rate) ? rng.uniform(0.0, 0.29) : rng.uniform(0.3, 1.0);
    x1 = std::min(x1, kp.x);
    y1 = std::min(y1, kp.y);
    x2 = std::max(x2, kp.x);
    y2 = std::max(y2, kp.y);
  }
  s.bbox = {x1 - 1.0, y1 - 1.0, x2 + 1.0, y2 + 1.0};
  return s;
}

// A wandering person: center follows a random walk, size stays near `size`.
inline Track track(Rng& rng, TrackId id, std::size_t n, double fps, posewatch::Point2 start, double size,
                   double invalid_rate = 0.1) {
  Track t;
  t.id = id;
  posewatch::Point2 c = start;
  for (std::size_t i = 0; i < n; ++i) {
    c.x += rng.uniform(-0.3, 0.3) * size;
    c.y += rng.uniform(-0.1, 0.1) * size;
    const double s = size * rng.uniform(0.9, 1.1);
    t.samples.push_back({static_cast<double>(i) / fps, static_cast<std::int64_t>(i), skeleton(rng, c, s, invalid_rate)});
  }
  return t;
}

// Two time-aligned tracks with optional smoothing already applied.
inline PairSegment pair(Rng& rng, std::size_t n, double fps = 30.0, double invalid_rate = 0.1) {
  const double size = rng.uniform(40.0, 120.0);
  const posewatch::Point2 a{rng.uniform(0.0, 400.0), rng.uniform(100.0, 300.0)};
  const posewatch::Point2 b{a.x + rng.uniform(-2.0, 2.0) * size, a.y + rng.uniform(-0.5, 0.5) * size};
  PairSegment p;
  p.aggressor = track(rng, TrackId{1, 0}, n, fps, a, size, invalid_rate);
  p.victim = track(rng, TrackId{2, 0}, n, fps, b, size, invalid_rate);
  p.fps = fps;
  return p;
}

// Applies x -> k * x + (dx, dy) to every coordinate of the segment.
inline Skeleton transform(const Skeleton& s, double k, double dx, double dy) {
  Skeleton out = s;
  for (auto& kp : out.keypoints) {
    kp.x = k * kp.x + dx;
    kp.y = k * kp.y + dy;
  }
  out.bbox = {k * s.bbox.x1 + dx, k * s.bbox.y1 + dy, k * s.bbox.x2 + dx, k * s.bbox.y2 + dy};
  return out;
}

inline Track transform(const Track& t, double k, double dx, double dy) {
  Track out = t;
  for (auto& smp : out.samples) smp.skeleton = transform(smp.skeleton, k, dx, dy);
  for (auto& s : out.smoothed) s = transform(s, k, dx, dy);
  return out;
}

inline PairSegment transform(const PairSegment& p, double k, double dx, double dy) {
  return {transform(p.aggressor, k, dx, dy), transform(p.victim, k, dx, dy), p.fps};
}

inline std::vector<bool> bits(Rng& rng, std::size_t n, double p = 0.5) {
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.bernoulli(p);
  return out;
}

}  // namespace gen
