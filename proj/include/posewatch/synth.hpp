#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posewatch/core_types.hpp"
#include "posewatch/features.hpp"

namespace posewatch {

enum class ScenarioKind { kSnatch, kWalkBy, kHandshake, kStanding };

std::string to_string(ScenarioKind kind);
// Throws InvalidSpec for unknown names.
ScenarioKind scenario_from_string(const std::string& name);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kStanding;
  double duration = 4.0;  // seconds
  double fps = 30.0;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;  // pixels; 0 also disables confidence dropout
  double scale = 100.0;      // pixels per torso height
  double dropout = 0.05;     // per keypoint and frame, when noisy

  // Throws InvalidSpec.
  void validate() const;
};

struct Clip {
  std::string name;
  ScenarioSpec spec;
  std::vector<FrameRecord> frames;
  int label = 0;            // 1 for snatch
  double event_time = 0.0;  // grab, handshake grip, closest pass, or midpoint
  std::int64_t aggressor_id = 0;
  std::int64_t victim_id = 0;
};

// Two articulated stick figures acting out `spec.kind`. Deterministic in the
// spec. Throws InvalidSpec.
Clip generate(const ScenarioSpec& spec);

struct SnatchCheck {
  double hand_to_torso_min = 0.0;
  double fast_hand_pct = 0.0;
  double contact_time = 0.0;  // time of the hand-to-torso minimum
  bool ok = false;
};

// Runs the feature extractors over a snatch clip (aggressor as A) and checks
// the construction guarantees: hand-to-torso minimum below 0.3, some fast-hand
// frames, and the minimum within 0.3 s of the scripted grab.
SnatchCheck check_snatch_guarantees(const Clip& clip, double alpha = 0.6,
                                    const FeatureConfig& cfg = {});

struct CorpusSpec {
  std::size_t n_positive = 29;
  std::size_t n_negative = 61;
  std::uint64_t seed = 42;
  double duration = 4.0;
  double fps = 30.0;
  double noise_sigma = 1.5;
  double min_scale = 70.0;
  double max_scale = 140.0;

  static CorpusSpec balanced(std::size_t n_per_class, std::uint64_t seed = 42);
  // 29:61 positive:negative split of `total` clips.
  static CorpusSpec paper_ratio(std::size_t total, std::uint64_t seed = 42);
};

struct Corpus {
  std::vector<Clip> clips;
};

// Positives first, then negatives cycling walk_by, handshake, standing.
// Clip i uses the substream (seed, i).
Corpus generate_corpus(const CorpusSpec& spec);

// Writes clip_XXXX.jsonl files plus manifest.json into `dir` (created).
void write_corpus(const Corpus& corpus, const std::string& dir);

struct ManifestEntry {
  std::string name;
  std::string file;  // relative to the manifest
  int label = 0;
  std::string kind;
  std::uint64_t seed = 0;
  double event_time = 0.0;
  std::int64_t aggressor_id = 0;
  std::int64_t victim_id = 0;
};

std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace posewatch
