#include "posewatch/temporal.hpp"

#include <algorithm>
#include <cmath>

#include "posewatch/error.hpp"

namespace posewatch {

HysteresisConfig HysteresisConfig::for_fps(double fps) {
  HysteresisConfig cfg;
  cfg.fps = fps;
  cfg.window = std::max(2, static_cast<int>(std::lround(0.4 * fps)));
  cfg.n_on = (3 * cfg.window + 4) / 5;  // ceil(0.6 W)
  cfg.n_off = std::max(1, cfg.window / 5);
  if (cfg.n_on < 2) cfg.n_on = 2;
  if (cfg.n_off >= cfg.n_on) cfg.n_off = cfg.n_on - 1;
  return cfg;
}

void HysteresisConfig::validate() const {
  if (!(1 <= n_off && n_off < n_on && n_on <= window)) {
    throw Error(ErrorCode::kInvalidConfig,
                "hysteresis needs 1 <= n_off < n_on <= window (got window=" + std::to_string(window) +
                    ", n_on=" + std::to_string(n_on) + ", n_off=" + std::to_string(n_off) + ")");
  }
  if (!(fps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "fps must be positive");
}

std::string to_string(AlarmKind kind) {
  return kind == AlarmKind::kActivated ? "activated" : "deactivated";
}

AlarmState::AlarmState(HysteresisConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  ring_.assign(static_cast<std::size_t>(cfg_.window), 0);
}

std::optional<AlarmEvent> AlarmState::step(bool positive, double timestamp, std::int64_t frame_index) {
  if (filled_ == ring_.size()) {
    count_ -= ring_[head_];
  } else {
    ++filled_;
  }
  ring_[head_] = positive ? 1 : 0;
  count_ += ring_[head_];
  head_ = (head_ + 1) % ring_.size();

  if (!active_ && count_ >= cfg_.n_on) {
    active_ = true;
  } else if (active_ && count_ <= cfg_.n_off) {
    active_ = false;
  } else {
    return std::nullopt;
  }
  last_transition_ = timestamp;
  return AlarmEvent{active_ ? AlarmKind::kActivated : AlarmKind::kDeactivated, timestamp, frame_index,
                    count_};
}

EvidenceWindow evidence_window(const AlarmEvent& event, double pre_span, double post_span, double fps,
                               double stream_start) {
  if (event.kind != AlarmKind::kActivated) {
    throw Error(ErrorCode::kNotActivationEvent, "evidence is stored for activations only");
  }
  if (pre_span < 0.0 || post_span < 0.0 || !(fps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "spans must be >= 0 and fps > 0");
  }
  EvidenceWindow w;
  w.trigger = event;
  w.start = std::max(stream_start, event.timestamp - pre_span);
  w.end = event.timestamp + post_span;
  w.first_frame = static_cast<std::int64_t>(std::ceil((w.start - stream_start) * fps - 1e-9));
  w.last_frame = static_cast<std::int64_t>(std::floor((w.end - stream_start) * fps + 1e-9));
  return w;
}

}  // namespace posewatch
