#include "posewatch/core_types.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "posewatch/error.hpp"

namespace posewatch {

namespace {

constexpr double kClampTolerance = 1e-9;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kMalformedRecord, std::string("non-finite ") + what);
  }
}

}  // namespace

std::string TrackId::to_string() const {
  auto s = std::to_string(source);
  if (segment > 0) {
    s += "." + std::to_string(segment);
  }
  return s;
}

Track Track::slice(double t0, double t1) const {
  Track out;
  out.id = id;
  const bool has_smoothed = smoothed.size() == samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].timestamp < t0 || samples[i].timestamp > t1) continue;
    out.samples.push_back(samples[i]);
    if (has_smoothed) out.smoothed.push_back(smoothed[i]);
  }
  return out;
}

PairSegment make_pair_segment(const Track& aggressor, const Track& victim, double t0,
                              double t1, double fps) {
  PairSegment pair;
  pair.fps = fps;
  pair.aggressor.id = aggressor.id;
  pair.victim.id = victim.id;
  const bool a_smoothed = aggressor.smoothed.size() == aggressor.samples.size();
  const bool b_smoothed = victim.smoothed.size() == victim.samples.size();

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < aggressor.size() && j < victim.size()) {
    const double ta = aggressor.time(i);
    const double tb = victim.time(j);
    if (ta < tb) {
      ++i;
    } else if (tb < ta) {
      ++j;
    } else {
      if (ta >= t0 && ta <= t1) {
        pair.aggressor.samples.push_back(aggressor.samples[i]);
        pair.victim.samples.push_back(victim.samples[j]);
        if (a_smoothed) pair.aggressor.smoothed.push_back(aggressor.smoothed[i]);
        if (b_smoothed) pair.victim.smoothed.push_back(victim.smoothed[j]);
      }
      ++i;
      ++j;
    }
  }
  if (pair.aggressor.size() < 2) {
    throw Error(ErrorCode::kNoTemporalOverlap,
                "tracks " + aggressor.id.to_string() + " and " + victim.id.to_string() +
                    " share fewer than 2 samples");
  }
  return pair;
}

FrameRecord validate_frame(FrameRecord record, std::optional<double> previous_timestamp) {
  if (record.frame_index < 0) {
    throw Error(ErrorCode::kMalformedRecord, "negative frame_index");
  }
  check_finite(record.timestamp, "timestamp");
  if (previous_timestamp && !(record.timestamp > *previous_timestamp)) {
    throw Error(ErrorCode::kMalformedRecord,
                "timestamp " + std::to_string(record.timestamp) + " does not increase");
  }

  std::set<std::int64_t> seen;
  for (auto& person : record.persons) {
    if (!seen.insert(person.track_id).second) {
      throw Error(ErrorCode::kMalformedRecord,
                  "duplicate track_id " + std::to_string(person.track_id));
    }
    for (auto& kp : person.skeleton.keypoints) {
      check_finite(kp.x, "keypoint x");
      check_finite(kp.y, "keypoint y");
      check_finite(kp.confidence, "confidence");
      if (kp.confidence < 0.0) {
        if (kp.confidence < -kClampTolerance) {
          throw Error(ErrorCode::kMalformedRecord, "confidence below 0");
        }
        kp.confidence = 0.0;
      } else if (kp.confidence > 1.0) {
        if (kp.confidence > 1.0 + kClampTolerance) {
          throw Error(ErrorCode::kMalformedRecord, "confidence above 1");
        }
        kp.confidence = 1.0;
      }
    }
    const auto& b = person.skeleton.bbox;
    check_finite(b.x1, "bbox");
    check_finite(b.y1, "bbox");
    check_finite(b.x2, "bbox");
    check_finite(b.y2, "bbox");
    if (b.x1 > b.x2 || b.y1 > b.y2) {
      throw Error(ErrorCode::kMalformedRecord, "bbox corners out of order");
    }
  }
  return record;
}

std::vector<Track> build_tracks(std::span<const FrameRecord> frames, int max_gap) {
  struct Open {
    Track track;
    std::int64_t last_frame = 0;
  };
  std::map<std::int64_t, Open> open;
  std::vector<Track> closed;

  for (const auto& frame : frames) {
    for (const auto& person : frame.persons) {
      auto it = open.find(person.track_id);
      if (it == open.end()) {
        Open o;
        o.track.id = TrackId{person.track_id, 0};
        it = open.emplace(person.track_id, std::move(o)).first;
      } else if (frame.frame_index - it->second.last_frame - 1 > max_gap) {
        const int next_segment = it->second.track.id.segment + 1;
        closed.push_back(std::move(it->second.track));
        it->second.track = Track{};
        it->second.track.id = TrackId{person.track_id, next_segment};
      }
      it->second.track.samples.push_back({frame.timestamp, frame.frame_index, person.skeleton});
      it->second.last_frame = frame.frame_index;
    }
  }
  for (auto& [id, o] : open) {
    closed.push_back(std::move(o.track));
  }
  std::sort(closed.begin(), closed.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  return closed;
}

}  // namespace posewatch
