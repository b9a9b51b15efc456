#include "posewatch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "posewatch/error.hpp"

namespace posewatch {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); }

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_config(key + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad_config(key + " must be finite");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_config(key + " must be an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad_config(key + " must be a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) bad_config(key + " must be true or false");
  return j.get<bool>();
}

std::size_t frames_for(double seconds, double fps) {
  return static_cast<std::size_t>(std::max<long>(1, std::lround(seconds * fps)));
}

// Common samples of two time-sorted tracks, as index pairs.
std::vector<std::pair<std::size_t, std::size_t>> common_samples(const Track& a, const Track& b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.time(i) < b.time(j)) {
      ++i;
    } else if (b.time(j) < a.time(i)) {
      ++j;
    } else {
      out.emplace_back(i++, j++);
    }
  }
  return out;
}

}  // namespace

std::size_t PipelineConfig::segment_frames() const { return frames_for(segment_length_s, fps); }
std::size_t PipelineConfig::stride_frames() const { return frames_for(segment_stride_s, fps); }

std::size_t PipelineConfig::min_pair_frames() const {
  return std::max<std::size_t>({frames_for(min_pair_s, fps), features.min_segment_frames, 2});
}

void PipelineConfig::validate() const {
  if (!(fps > 0.0)) bad_config("fps must be positive");
  if (!(smoothing.alpha > 0.0 && smoothing.alpha < 1.0)) bad_config("alpha must lie in (0, 1)");
  if (!(segment_length_s > 0.0)) bad_config("segment_length_s must be positive");
  if (!(segment_stride_s > 0.0)) bad_config("segment_stride_s must be positive");
  if (!(min_pair_s > 0.0 && min_pair_s <= segment_length_s)) {
    bad_config("min_pair_s must lie in (0, segment_length_s]");
  }
  if (max_gap_frames < 0) bad_config("max_gap_frames must be >= 0");
  if (!(features.fast_hand_threshold >= 0.0)) bad_config("fast_hand_threshold must be >= 0");
  if (!(features.elbow_flex_threshold_deg >= 0.0 && features.elbow_flex_threshold_deg <= 180.0)) {
    bad_config("elbow_flex_threshold_deg must lie in [0, 180]");
  }
  if (!(features.close_hand_threshold >= 0.0)) bad_config("close_hand_threshold must be >= 0");
  if (!(features.hand_toward_threshold >= -1.0 && features.hand_toward_threshold <= 1.0)) {
    bad_config("hand_toward_threshold must lie in [-1, 1]");
  }
  if (!(features.peak_followup_s >= 0.0)) bad_config("peak_followup_s must be >= 0");
  if (!(features.post_contact_window_s >= 0.0)) bad_config("post_contact_window_s must be >= 0");
  if (!(features.missing_distance >= 0.0)) bad_config("missing_distance must be >= 0");
  if (features.min_segment_frames < 2) bad_config("min_segment_frames must be >= 2");
  if (select_k == 0) bad_config("select_k must be >= 1");
  if (!(evidence_pre_s >= 0.0 && evidence_post_s >= 0.0)) bad_config("evidence spans must be >= 0");
  if (sink_retries < 0) bad_config("sink_retries must be >= 0");
  if (!(sink_backoff_s >= 0.0)) bad_config("sink_backoff_s must be >= 0");
  forest.validate();
  hysteresis.validate();
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_config("config must be a JSON object");

  PipelineConfig c;
  if (doc.contains("fps")) c.fps = get_number(doc["fps"], "fps");
  c.hysteresis = HysteresisConfig::for_fps(c.fps);

  for (const auto& [key, v] : doc.items()) {
    if (key == "fps") continue;
    else if (key == "alpha") c.smoothing.alpha = get_number(v, key);
    else if (key == "fast_hand_threshold") c.features.fast_hand_threshold = get_number(v, key);
    else if (key == "elbow_flex_threshold_deg") c.features.elbow_flex_threshold_deg = get_number(v, key);
    else if (key == "close_hand_threshold") c.features.close_hand_threshold = get_number(v, key);
    else if (key == "hand_toward_threshold") c.features.hand_toward_threshold = get_number(v, key);
    else if (key == "peak_followup_s") c.features.peak_followup_s = get_number(v, key);
    else if (key == "post_contact_window_s") c.features.post_contact_window_s = get_number(v, key);
    else if (key == "missing_distance") c.features.missing_distance = get_number(v, key);
    else if (key == "min_segment_frames") {
      const auto n = get_integer(v, key);
      if (n < 2) bad_config("min_segment_frames must be >= 2");
      c.features.min_segment_frames = static_cast<std::size_t>(n);
    }
    else if (key == "segment_length_s") c.segment_length_s = get_number(v, key);
    else if (key == "segment_stride_s") c.segment_stride_s = get_number(v, key);
    else if (key == "min_pair_s") c.min_pair_s = get_number(v, key);
    else if (key == "max_gap_frames") c.max_gap_frames = static_cast<int>(get_integer(v, key));
    else if (key == "both_orderings") c.both_orderings = get_bool(v, key);
    else if (key == "n_trees") c.forest.n_trees = static_cast<int>(get_integer(v, key));
    else if (key == "seed") {
      if (!v.is_number_unsigned()) bad_config("seed must be a non-negative integer");
      c.forest.seed = v.get<std::uint64_t>();
    }
    else if (key == "class_weight") {
      const auto mode = get_string(v, key);
      if (mode == "balanced") c.forest.class_weight = ClassWeightMode::kBalanced;
      else if (mode == "uniform") c.forest.class_weight = ClassWeightMode::kUniform;
      else bad_config("class_weight must be \"balanced\" or \"uniform\"");
    }
    else if (key == "max_depth") {
      if (v.is_null()) c.forest.max_depth.reset();
      else c.forest.max_depth = static_cast<int>(get_integer(v, key));
    }
    else if (key == "min_samples_leaf") c.forest.min_samples_leaf = static_cast<int>(get_integer(v, key));
    else if (key == "features_per_split") {
      if (v.is_null()) c.forest.features_per_split.reset();
      else c.forest.features_per_split = static_cast<int>(get_integer(v, key));
    }
    else if (key == "bootstrap") c.forest.bootstrap = get_bool(v, key);
    else if (key == "threads") c.forest.threads = static_cast<int>(get_integer(v, key));
    else if (key == "select_k") {
      const auto k = get_integer(v, key);
      if (k < 1) bad_config("select_k must be >= 1");
      c.select_k = static_cast<std::size_t>(k);
    }
    else if (key == "hysteresis_window") c.hysteresis.window = static_cast<int>(get_integer(v, key));
    else if (key == "hysteresis_n_on") c.hysteresis.n_on = static_cast<int>(get_integer(v, key));
    else if (key == "hysteresis_n_off") c.hysteresis.n_off = static_cast<int>(get_integer(v, key));
    else if (key == "evidence_pre_s") c.evidence_pre_s = get_number(v, key);
    else if (key == "evidence_post_s") c.evidence_post_s = get_number(v, key);
    else if (key == "features") {
      if (!v.is_array()) bad_config("features must be an array of names");
      c.expected_features.clear();
      for (const auto& n : v) c.expected_features.push_back(get_string(n, key));
    }
    else if (key == "input") c.input = get_string(v, key);
    else if (key == "model") c.model = get_string(v, key);
    else if (key == "output") c.output = get_string(v, key);
    else if (key == "evidence_dir") c.evidence_dir = get_string(v, key);
    else if (key == "sink_url") c.sink_url = get_string(v, key);
    else if (key == "sink_retries") c.sink_retries = static_cast<int>(get_integer(v, key));
    else if (key == "sink_backoff_s") c.sink_backoff_s = get_number(v, key);
    else bad_config("unknown config key '" + key + "'");
  }
  c.hysteresis.fps = c.fps;
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) { return from_json(read_text_file(path)); }

std::string PipelineConfig::to_json() const {
  json j;
  j["fps"] = fps;
  j["alpha"] = smoothing.alpha;
  j["fast_hand_threshold"] = features.fast_hand_threshold;
  j["elbow_flex_threshold_deg"] = features.elbow_flex_threshold_deg;
  j["close_hand_threshold"] = features.close_hand_threshold;
  j["hand_toward_threshold"] = features.hand_toward_threshold;
  j["peak_followup_s"] = features.peak_followup_s;
  j["post_contact_window_s"] = features.post_contact_window_s;
  j["missing_distance"] = features.missing_distance;
  j["min_segment_frames"] = features.min_segment_frames;
  j["segment_length_s"] = segment_length_s;
  j["segment_stride_s"] = segment_stride_s;
  j["min_pair_s"] = min_pair_s;
  j["max_gap_frames"] = max_gap_frames;
  j["both_orderings"] = both_orderings;
  j["n_trees"] = forest.n_trees;
  j["seed"] = forest.seed;
  j["class_weight"] = forest.class_weight == ClassWeightMode::kBalanced ? "balanced" : "uniform";
  j["max_depth"] = forest.max_depth ? json(*forest.max_depth) : json(nullptr);
  j["min_samples_leaf"] = forest.min_samples_leaf;
  j["features_per_split"] = forest.features_per_split ? json(*forest.features_per_split) : json(nullptr);
  j["bootstrap"] = forest.bootstrap;
  j["threads"] = forest.threads;
  j["select_k"] = select_k;
  j["hysteresis_window"] = hysteresis.window;
  j["hysteresis_n_on"] = hysteresis.n_on;
  j["hysteresis_n_off"] = hysteresis.n_off;
  j["evidence_pre_s"] = evidence_pre_s;
  j["evidence_post_s"] = evidence_post_s;
  if (!expected_features.empty()) j["features"] = expected_features;
  j["input"] = input;
  j["model"] = model;
  j["output"] = output;
  j["evidence_dir"] = evidence_dir;
  j["sink_url"] = sink_url;
  j["sink_retries"] = sink_retries;
  j["sink_backoff_s"] = sink_backoff_s;
  return j.dump(2) + "\n";
}

std::string PairKey::to_string() const { return first.to_string() + "-" + second.to_string(); }

PairKey make_pair_key(const TrackId& a, const TrackId& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

bool is_evaluation_point(std::size_t position, std::size_t window, std::size_t stride) {
  if (position + 1 < window) return false;
  return (position + 1 - window) % stride == 0;
}

std::optional<WindowPair> select_window_pair(std::span<const Track> tracks, double t0, double t1,
                                             const PipelineConfig& cfg) {
  const std::size_t need = cfg.min_pair_frames();
  std::vector<std::size_t> order(tracks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return tracks[x].id < tracks[y].id; });

  std::optional<std::pair<std::size_t, std::size_t>> best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const Track& a = tracks[order[oi]];
      const Track& b = tracks[order[oj]];
      const auto common = common_samples(a, b);
      std::size_t in_window = 0;
      double sum = 0.0;
      std::size_t used = 0;
      for (auto [i, j] : common) {
        if (a.time(i) < t0 || a.time(i) > t1) continue;
        ++in_window;
        const auto ca = body_center(a.pose(i));
        const auto cb = body_center(b.pose(j));
        if (!ca || !cb) continue;
        sum += distance(*ca, *cb);
        ++used;
      }
      if (in_window < need || used == 0) continue;
      const double mean = sum / static_cast<double>(used);
      if (mean < best_distance) {
        best_distance = mean;
        best = std::make_pair(order[oi], order[oj]);
      }
    }
  }
  if (!best) return std::nullopt;

  WindowPair out;
  out.mean_center_distance = best_distance;
  PairSegment seg = make_pair_segment(tracks[best->first], tracks[best->second], t0, t1, cfg.fps);
  // Role order from mean motion over the shared samples; the lower id leads
  // when neither track has usable motion.
  const std::array<Track, 2> both{seg.aggressor, seg.victim};
  try {
    const auto roles = aggressor_probabilities(both, cfg.segment_length_s);
    const std::size_t lead = most_likely_aggressor(roles);
    out.aggressor_probability = roles[lead].p_aggressor;
    if (lead == 1) seg = seg.swapped();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientHistory) throw;
  }
  out.segment = std::move(seg);
  return out;
}

SegmentClassifier::SegmentClassifier(std::shared_ptr<const ForestModel> model, const PipelineConfig& cfg)
    : model_(std::move(model)), cfg_(cfg) {
  if (!model_) throw Error(ErrorCode::kInvalidArgument, "no model");
  if (model_->schema_version != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch, "model schema " + model_->schema_version + ", engine schema " +
                                                std::string(kSchemaVersion));
  }
  try {
    schema_ = std::make_shared<const FeatureSchema>(model_->feature_names);
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("model features: ") + e.what());
  }
  if (schema_->names() != model_->feature_names) {
    throw Error(ErrorCode::kSchemaMismatch, "model uses non-canonical feature names");
  }
  if (!cfg.expected_features.empty()) {
    FeatureSchema expected(cfg.expected_features);
    if (expected.names() != schema_->names()) {
      throw Error(ErrorCode::kSchemaMismatch, "model features differ from the configured feature list");
    }
  }
}

std::optional<WindowDecision> SegmentClassifier::classify(std::span<const Track> tracks, double t0,
                                                          double t1) const {
  const auto picked = select_window_pair(tracks, t0, t1, cfg_);
  if (!picked) return std::nullopt;
  const PairSegment& seg = picked->segment;
  if (seg.size() < cfg_.features.min_segment_frames) return std::nullopt;

  WindowDecision d;
  d.pair = make_pair_key(seg.aggressor.id, seg.victim.id);
  d.start_time = seg.start_time();
  d.end_time = seg.end_time();
  d.aggressor = seg.aggressor.id;
  d.probability = model_->predict(extract_segment(seg, schema_, cfg_.features)).probability;
  if (cfg_.both_orderings) {
    const double swapped = model_->predict(extract_segment(seg.swapped(), schema_, cfg_.features)).probability;
    if (swapped > d.probability) {
      d.probability = swapped;
      d.aggressor = seg.victim.id;
    }
  }
  d.label = d.probability >= 0.5 ? 1 : 0;
  return d;
}

PairAlarms::PairAlarms(HysteresisConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<PairEvent> PairAlarms::advance(double timestamp, std::int64_t frame_index, bool evaluated,
                                           const std::optional<WindowDecision>& decision) {
  if (evaluated) {
    for (auto& [key, st] : states_) st.prediction = 0;
    if (decision) {
      auto it = states_.find(decision->pair);
      if (it == states_.end()) it = states_.emplace(decision->pair, PairState{AlarmState(cfg_), 0, 0.0}).first;
      it->second.prediction = decision->label;
      it->second.probability = decision->probability;
    }
  }
  std::vector<PairEvent> events;
  for (auto it = states_.begin(); it != states_.end();) {
    auto& st = it->second;
    if (auto ev = st.alarm.step(st.prediction == 1, timestamp, frame_index)) {
      events.push_back({it->first, *ev, st.probability});
    }
    if (st.prediction == 0 && !st.alarm.active() && st.alarm.window_count() == 0) {
      it = states_.erase(it);
    } else {
      ++it;
    }
  }
  return events;
}

StreamDetector::StreamDetector(std::shared_ptr<const ForestModel> model, const PipelineConfig& cfg)
    : cfg_(cfg), classifier_(std::move(model), cfg), alarms_(cfg.hysteresis) {
  cfg_.validate();
}

std::vector<PairEvent> StreamDetector::push(const FrameRecord& frame) {
  if (!stream_start_) stream_start_ = frame.timestamp;
  for (const auto& person : frame.persons) {
    auto [it, fresh] = sources_.try_emplace(person.track_id);
    SourceState& src = it->second;
    if (fresh) {
      src.current = TrackId{person.track_id, 0};
    } else if (frame.frame_index - src.last_frame - 1 > cfg_.max_gap_frames) {
      src.current.segment += 1;
      src.smoother.reset();
    }
    if (!src.smoother) src.smoother = std::make_unique<SkeletonSmoother>(cfg_.smoothing);
    src.last_frame = frame.frame_index;

    Track& buf = buffers_[src.current];
    buf.id = src.current;
    buf.samples.push_back({frame.timestamp, frame.frame_index, person.skeleton});
    buf.smoothed.push_back(src.smoother->push(person.skeleton));
  }

  const std::size_t window = cfg_.segment_frames();
  recent_times_.push_back(frame.timestamp);
  if (recent_times_.size() > window) recent_times_.pop_front();
  const double t0 = recent_times_.front();
  const double t1 = frame.timestamp;

  // Drop samples that can no longer enter a window.
  for (auto it = buffers_.begin(); it != buffers_.end();) {
    Track& buf = it->second;
    std::size_t drop = 0;
    while (drop < buf.samples.size() && buf.samples[drop].timestamp < t0) ++drop;
    if (drop > 0) {
      buf.samples.erase(buf.samples.begin(), buf.samples.begin() + static_cast<std::ptrdiff_t>(drop));
      buf.smoothed.erase(buf.smoothed.begin(), buf.smoothed.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    it = buf.samples.empty() ? buffers_.erase(it) : std::next(it);
  }

  const std::size_t position = frames_seen_++;
  const bool evaluate = is_evaluation_point(position, window, cfg_.stride_frames());
  std::optional<WindowDecision> decision;
  if (evaluate) {
    ++evaluations_;
    std::vector<Track> tracks;
    tracks.reserve(buffers_.size());
    for (const auto& [id, buf] : buffers_) tracks.push_back(buf);
    decision = classifier_.classify(tracks, t0, t1);
  }
  return alarms_.advance(frame.timestamp, frame.frame_index, evaluate, decision);
}

std::vector<Track> smoothed_tracks(std::span<const FrameRecord> frames, const PipelineConfig& cfg) {
  auto tracks = build_tracks(frames, cfg.max_gap_frames);
  for (auto& t : tracks) t = smooth_track(std::move(t), cfg.smoothing);
  return tracks;
}

std::vector<Track> window_slices(std::span<const Track> tracks, double t0, double t1) {
  std::vector<Track> out;
  for (const auto& t : tracks) {
    auto s = t.slice(t0, t1);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<PairEvent> detect_offline(std::span<const FrameRecord> frames,
                                      std::shared_ptr<const ForestModel> model,
                                      const PipelineConfig& cfg) {
  cfg.validate();
  SegmentClassifier classifier(std::move(model), cfg);
  PairAlarms alarms(cfg.hysteresis);
  const auto tracks = smoothed_tracks(frames, cfg);
  const std::size_t window = cfg.segment_frames();
  const std::size_t stride = cfg.stride_frames();

  std::vector<PairEvent> events;
  for (std::size_t e = 0; e < frames.size(); ++e) {
    const bool evaluate = is_evaluation_point(e, window, stride);
    std::optional<WindowDecision> decision;
    if (evaluate) {
      const double t0 = frames[e + 1 - window].timestamp;
      const double t1 = frames[e].timestamp;
      decision = classifier.classify(window_slices(tracks, t0, t1), t0, t1);
    }
    for (auto& ev : alarms.advance(frames[e].timestamp, frames[e].frame_index, evaluate, decision)) {
      events.push_back(std::move(ev));
    }
  }
  return events;
}

namespace {

SegmentRow make_row(const PairSegment& seg, const std::shared_ptr<const FeatureSchema>& schema,
                    const PipelineConfig& cfg, std::string id) {
  const auto fv = extract_segment(seg, schema, cfg.features);
  SegmentRow row;
  row.id = std::move(id);
  row.values.assign(fv.values().begin(), fv.values().end());
  row.aggressor = seg.aggressor.id;
  row.victim = seg.victim.id;
  row.start_time = seg.start_time();
  row.end_time = seg.end_time();
  return row;
}

}  // namespace

std::vector<SegmentRow> extract_stream_rows(std::span<const FrameRecord> frames,
                                            std::shared_ptr<const FeatureSchema> schema,
                                            const PipelineConfig& cfg, bool both_orderings,
                                            const std::string& id_prefix) {
  cfg.validate();
  const auto tracks = smoothed_tracks(frames, cfg);
  const std::size_t window = cfg.segment_frames();
  const std::size_t stride = cfg.stride_frames();
  std::vector<SegmentRow> rows;
  for (std::size_t e = 0; e < frames.size(); ++e) {
    if (!is_evaluation_point(e, window, stride)) continue;
    const double t0 = frames[e + 1 - window].timestamp;
    const double t1 = frames[e].timestamp;
    const auto picked = select_window_pair(window_slices(tracks, t0, t1), t0, t1, cfg);
    if (!picked || picked->segment.size() < cfg.features.min_segment_frames) continue;
    const std::string base = id_prefix + "f" + std::to_string(frames[e].frame_index);
    const auto& seg = picked->segment;
    const std::string roles = seg.aggressor.id.to_string() + ">" + seg.victim.id.to_string();
    rows.push_back(make_row(seg, schema, cfg, base + ":" + roles));
    if (both_orderings) {
      const auto sw = seg.swapped();
      rows.push_back(make_row(sw, schema, cfg,
                              base + ":" + sw.aggressor.id.to_string() + ">" + sw.victim.id.to_string()));
    }
  }
  return rows;
}

std::optional<WindowPair> event_window_pair(std::span<const FrameRecord> frames, double event_time,
                                            const PipelineConfig& cfg) {
  if (frames.empty()) return std::nullopt;
  const std::size_t window = std::min(cfg.segment_frames(), frames.size());
  // Frame nearest the event, then a window centered on it.
  std::size_t center = 0;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (std::abs(frames[i].timestamp - event_time) < std::abs(frames[center].timestamp - event_time)) {
      center = i;
    }
  }
  const std::size_t half = window / 2;
  std::size_t start = center > half ? center - half : 0;
  start = std::min(start, frames.size() - window);
  const double t0 = frames[start].timestamp;
  const double t1 = frames[start + window - 1].timestamp;
  const auto tracks = smoothed_tracks(frames, cfg);
  return select_window_pair(window_slices(tracks, t0, t1), t0, t1, cfg);
}

LabeledRows extract_event_rows(std::span<const FrameRecord> frames, const LabeledClip& clip,
                               std::shared_ptr<const FeatureSchema> schema, const PipelineConfig& cfg,
                               bool both_orderings) {
  LabeledRows out;
  const auto picked = event_window_pair(frames, clip.event_time, cfg);
  if (!picked || picked->segment.size() < cfg.features.min_segment_frames) return out;

  auto label_for = [&](const PairSegment& seg) {
    if (clip.label == 0) return 0;
    return seg.aggressor.id.source == clip.aggressor_id ? 1 : 0;
  };
  const auto& seg = picked->segment;
  if (!both_orderings) {
    out.rows.push_back(make_row(seg, schema, cfg, clip.id));
    // A positive clip keeps its label regardless of the role estimate.
    out.labels.push_back(clip.label);
    return out;
  }
  for (const PairSegment& s : {seg, seg.swapped()}) {
    out.rows.push_back(make_row(s, schema, cfg,
                                clip.id + ":" + s.aggressor.id.to_string() + ">" + s.victim.id.to_string()));
    out.labels.push_back(label_for(s));
  }
  return out;
}

Dataset build_dataset(const Corpus& corpus, const PipelineConfig& cfg) {
  auto schema = std::make_shared<const FeatureSchema>(FeatureSchema::full());
  Dataset data;
  data.feature_names = schema->names();
  for (const auto& clip : corpus.clips) {
    const LabeledClip lc{clip.name, clip.label, clip.event_time, clip.aggressor_id};
    auto rows = extract_event_rows(clip.frames, lc, schema, cfg, false);
    for (std::size_t i = 0; i < rows.rows.size(); ++i) {
      data.rows.push_back(std::move(rows.rows[i].values));
      data.labels.push_back(rows.labels[i]);
      data.ids.push_back(std::move(rows.rows[i].id));
    }
  }
  return data;
}

}  // namespace posewatch
