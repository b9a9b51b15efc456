#pragma once

// Hand-placed poses for example-based tests.

#include <cstdint>
#include <vector>

#include "posewatch/core_types.hpp"

namespace fix {

using posewatch::Joint;
using posewatch::Point2;
using posewatch::Skeleton;

// Upright figure whose hip center sits at `hip` with torso height `torso`;
// every keypoint valid, facing +x (nose and ears offset toward +x).
inline Skeleton upright(Point2 hip, double torso = 1.0, double confidence = 0.9) {
  static constexpr double kLayout[17][2] = {
      {0.1, -1.4},  {0.08, -1.45}, {0.08, -1.45}, {-0.05, -1.4}, {-0.05, -1.4}, {0.0, -1.0},
      {0.0, -1.0},  {0.0, -0.6},   {0.0, -0.6},   {0.0, -0.2},   {0.0, -0.2},   {0.0, 0.0},
      {0.0, 0.0},   {0.0, 0.9},    {0.0, 0.9},    {0.0, 1.8},    {0.0, 1.8},
  };
  Skeleton s;
  for (std::size_t j = 0; j < 17; ++j) {
    s.keypoints[j] = {hip.x + torso * kLayout[j][0], hip.y + torso * kLayout[j][1], confidence};
  }
  s.bbox = {hip.x - 0.3 * torso, hip.y - 1.6 * torso, hip.x + 0.3 * torso, hip.y + 1.9 * torso};
  return s;
}

inline Skeleton moved(Skeleton s, Point2 d) {
  for (auto& k : s.keypoints) {
    k.x += d.x;
    k.y += d.y;
  }
  s.bbox = {s.bbox.x1 + d.x, s.bbox.y1 + d.y, s.bbox.x2 + d.x, s.bbox.y2 + d.y};
  return s;
}

inline posewatch::Track track_of(std::vector<Skeleton> poses, double fps = 30.0, std::int64_t id = 1) {
  posewatch::Track t;
  t.id = {id, 0};
  for (std::size_t i = 0; i < poses.size(); ++i) {
    t.samples.push_back({static_cast<double>(i) / fps, static_cast<std::int64_t>(i), poses[i]});
  }
  return t;
}

inline posewatch::PairSegment pair_of(std::vector<Skeleton> a, std::vector<Skeleton> b, double fps = 30.0) {
  return {track_of(std::move(a), fps, 1), track_of(std::move(b), fps, 2), fps};
}

inline posewatch::FrameRecord frame(std::int64_t index, double fps,
                                    std::vector<std::pair<std::int64_t, Skeleton>> people) {
  posewatch::FrameRecord f;
  f.frame_index = index;
  f.timestamp = static_cast<double>(index) / fps;
  for (auto& [id, s] : people) f.persons.push_back({id, s});
  return f;
}

}  // namespace fix
