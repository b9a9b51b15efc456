#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace posewatch {

// Two-threshold alarm over a sliding window of binary predictions: the alarm
// turns on when at least n_on of the last `window` predictions are positive,
// and off once the positive count falls to n_off or below.
struct HysteresisConfig {
  int window = 12;
  int n_on = 8;
  int n_off = 2;
  double fps = 30.0;

  // Window of round(0.4 s) frames (at least 2), n_on = ceil(0.6 W),
  // n_off = floor(0.2 W) raised to 1 and kept below n_on.
  static HysteresisConfig for_fps(double fps);
  // Throws InvalidConfig unless 1 <= n_off < n_on <= window and fps > 0.
  void validate() const;
};

enum class AlarmKind { kActivated, kDeactivated };

std::string to_string(AlarmKind kind);

struct AlarmEvent {
  AlarmKind kind = AlarmKind::kActivated;
  double timestamp = 0.0;
  std::int64_t frame_index = 0;
  int window_count = 0;

  friend bool operator==(const AlarmEvent&, const AlarmEvent&) = default;
};

class AlarmState {
 public:
  explicit AlarmState(HysteresisConfig cfg);

  // Inserts the prediction, then evaluates the thresholds on the window
  // (counted over the samples seen so far until the window fills).
  std::optional<AlarmEvent> step(bool positive, double timestamp = 0.0, std::int64_t frame_index = 0);

  bool active() const { return active_; }
  int window_count() const { return count_; }
  std::size_t buffered() const { return filled_; }
  std::optional<double> last_transition() const { return last_transition_; }
  const HysteresisConfig& config() const { return cfg_; }

 private:
  HysteresisConfig cfg_;
  std::vector<std::uint8_t> ring_;
  std::size_t head_ = 0;
  std::size_t filled_ = 0;
  int count_ = 0;
  bool active_ = false;
  std::optional<double> last_transition_;
};

struct EvidenceWindow {
  double start = 0.0;
  double end = 0.0;
  AlarmEvent trigger;
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;
};

inline constexpr double kDefaultEvidencePre = 2.0;
inline constexpr double kDefaultEvidencePost = 4.0;

// [trigger - pre, trigger + post] clamped at `stream_start`, with the frame
// range derived from fps. Throws NotActivationEvent for deactivations.
EvidenceWindow evidence_window(const AlarmEvent& event, double pre_span = kDefaultEvidencePre,
                               double post_span = kDefaultEvidencePost, double fps = 30.0,
                               double stream_start = 0.0);

}  // namespace posewatch
