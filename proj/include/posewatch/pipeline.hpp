#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posewatch/core_types.hpp"
#include "posewatch/features.hpp"
#include "posewatch/forest.hpp"
#include "posewatch/io.hpp"
#include "posewatch/preprocess.hpp"
#include "posewatch/synth.hpp"
#include "posewatch/temporal.hpp"

namespace posewatch {

struct PipelineConfig {
  double fps = 30.0;
  SmoothingConfig smoothing;
  FeatureConfig features;
  double segment_length_s = 2.0;
  double segment_stride_s = 0.5;
  // Shortest overlap, in seconds, for two tracks to form a candidate pair.
  double min_pair_s = 1.0;
  int max_gap_frames = kDefaultMaxGapFrames;
  bool both_orderings = true;
  ForestConfig forest;
  std::size_t select_k = 10;
  HysteresisConfig hysteresis = HysteresisConfig::for_fps(30.0);
  double evidence_pre_s = kDefaultEvidencePre;
  double evidence_post_s = kDefaultEvidencePost;
  // Expected model features; empty accepts whatever the model was trained on.
  std::vector<std::string> expected_features;

  std::string input;
  std::string model;
  std::string output;
  std::string evidence_dir;
  std::string sink_url;
  int sink_retries = 2;
  double sink_backoff_s = 1.0;

  std::size_t segment_frames() const;
  std::size_t stride_frames() const;
  std::size_t min_pair_frames() const;

  // Throws InvalidConfig.
  void validate() const;

  // Flat JSON object; unknown keys and out-of-range values throw
  // InvalidConfig. Hysteresis settings not given are derived from fps.
  static PipelineConfig from_json(const std::string& text);
  static PipelineConfig from_file(const std::string& path);
  std::string to_json() const;
};

// Unordered pair of tracks, stored low id first.
struct PairKey {
  TrackId first;
  TrackId second;
  std::string to_string() const;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

PairKey make_pair_key(const TrackId& a, const TrackId& b);

// Stream position `position` (0-based count of frames seen minus one) closes
// a segment window when a full window is available and the window start lies
// on the stride grid.
bool is_evaluation_point(std::size_t position, std::size_t window, std::size_t stride);

// The pair evaluated in one window: the two tracks with the smallest mean
// body-center distance (pixels) over their common samples, ordered by role
// probability (aggressor first).
struct WindowPair {
  PairSegment segment;
  double mean_center_distance = 0.0;
  double aggressor_probability = 0.5;
};

// `tracks` are smoothed slices restricted to [t0, t1]. Ties in distance go
// to the lexicographically smaller id pair. nullopt when no two tracks share
// at least cfg.min_pair_frames() samples with usable centers.
std::optional<WindowPair> select_window_pair(std::span<const Track> tracks, double t0, double t1,
                                             const PipelineConfig& cfg);

struct WindowDecision {
  PairKey pair;
  TrackId aggressor;
  double probability = 0.0;
  int label = 0;
  double start_time = 0.0;
  double end_time = 0.0;
};

class SegmentClassifier {
 public:
  // Throws SchemaMismatch when the model's features are not catalog features,
  // its schema version differs, or cfg.expected_features disagrees.
  SegmentClassifier(std::shared_ptr<const ForestModel> model, const PipelineConfig& cfg);

  // Classifies the window's pair, under both role orderings when configured
  // (the higher probability wins, the role-probability ordering on ties).
  std::optional<WindowDecision> classify(std::span<const Track> tracks, double t0, double t1) const;

  const FeatureSchema& schema() const { return *schema_; }

 private:
  std::shared_ptr<const ForestModel> model_;
  std::shared_ptr<const FeatureSchema> schema_;
  PipelineConfig cfg_;
};

struct PairEvent {
  PairKey pair;
  AlarmEvent event;
  double probability = 0.0;  // of the latest decision for the pair
};

// Per-pair hysteresis driven once per frame. A pair gets an alarm state when
// first classified; its prediction is held between evaluations and reset to
// 0 whenever an evaluation selects a different pair (or none).
class PairAlarms {
 public:
  explicit PairAlarms(HysteresisConfig cfg);

  std::vector<PairEvent> advance(double timestamp, std::int64_t frame_index, bool evaluated,
                                 const std::optional<WindowDecision>& decision);

  std::size_t tracked_pairs() const { return states_.size(); }

 private:
  struct PairState {
    AlarmState alarm;
    int prediction = 0;
    double probability = 0.0;
  };
  HysteresisConfig cfg_;
  std::map<PairKey, PairState> states_;
};

// Incremental detector: smoothing, track splitting, windowing, classification
// and hysteresis, one frame at a time. Frames must already be validated.
class StreamDetector {
 public:
  StreamDetector(std::shared_ptr<const ForestModel> model, const PipelineConfig& cfg);

  std::vector<PairEvent> push(const FrameRecord& frame);

  std::size_t frames_seen() const { return frames_seen_; }
  std::size_t evaluations() const { return evaluations_; }
  std::optional<double> stream_start() const { return stream_start_; }

 private:
  struct SourceState {
    TrackId current;
    std::int64_t last_frame = 0;
    std::unique_ptr<SkeletonSmoother> smoother;
  };

  PipelineConfig cfg_;
  SegmentClassifier classifier_;
  PairAlarms alarms_;
  std::map<std::int64_t, SourceState> sources_;
  std::map<TrackId, Track> buffers_;
  std::deque<double> recent_times_;
  std::size_t frames_seen_ = 0;
  std::size_t evaluations_ = 0;
  std::optional<double> stream_start_;
};

// Same computation from whole-stream tracks (build_tracks + smooth_track).
std::vector<PairEvent> detect_offline(std::span<const FrameRecord> frames,
                                      std::shared_ptr<const ForestModel> model,
                                      const PipelineConfig& cfg);

// Smoothed tracks of a whole stream.
std::vector<Track> smoothed_tracks(std::span<const FrameRecord> frames, const PipelineConfig& cfg);

// Tracks restricted to [t0, t1], empty slices dropped.
std::vector<Track> window_slices(std::span<const Track> tracks, double t0, double t1);

struct SegmentRow {
  std::string id;
  std::vector<double> values;
  TrackId aggressor;
  TrackId victim;
  double start_time = 0.0;
  double end_time = 0.0;
};

// One row per evaluation window of the stream (same schedule as streaming);
// both role orderings when `both_orderings`.
std::vector<SegmentRow> extract_stream_rows(std::span<const FrameRecord> frames,
                                            std::shared_ptr<const FeatureSchema> schema,
                                            const PipelineConfig& cfg, bool both_orderings,
                                            const std::string& id_prefix = "");

// The window of segment length centered on `event_time` (shifted to fit the
// stream). nullopt when no pair qualifies.
std::optional<WindowPair> event_window_pair(std::span<const FrameRecord> frames, double event_time,
                                            const PipelineConfig& cfg);

struct LabeledClip {
  std::string id;
  int label = 0;
  double event_time = 0.0;
  std::int64_t aggressor_id = 0;  // scripted aggressor source id
};

struct LabeledRows {
  std::vector<SegmentRow> rows;
  std::vector<int> labels;
};

// Event-centered rows for one labeled clip, features in `schema` order. With
// both orderings, a positive clip's row with the roles swapped is labeled 0.
LabeledRows extract_event_rows(std::span<const FrameRecord> frames, const LabeledClip& clip,
                               std::shared_ptr<const FeatureSchema> schema, const PipelineConfig& cfg,
                               bool both_orderings);

// Full-catalog dataset with one primary-ordering row per clip.
Dataset build_dataset(const Corpus& corpus, const PipelineConfig& cfg);

}  // namespace posewatch
