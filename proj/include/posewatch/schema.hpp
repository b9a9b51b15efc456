#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace posewatch {

inline constexpr std::string_view kSchemaVersion = "v1";

// Range class of a feature; decides its missing sentinel and value bounds.
enum class FeatureKind {
  kPercentage,  // [0, 100]
  kIou,         // [0, 1]
  kCosine,      // [-1, 1]
  kDistance,    // >= 0, torso-height units
  kOther,
};

// Statistics applied uniformly to every per-frame series.
inline constexpr std::array<std::string_view, 5> kSeriesStatistics = {"mean", "median", "max",
                                                                      "min", "p95"};

// Per-frame series, in canonical order.
inline constexpr std::array<std::string_view, 19> kSeriesNames = {
    "velocity",      "acceleration", "handVelocity", "handAcceleration", "handJerk",
    "armExtension",  "elbowAngleL",  "elbowAngleR",  "bboxAreaRate",     "distance",
    "distanceRate",  "iou",          "relativeSpeed", "handTowardCos",   "handToTorso",
    "handToHip",     "AfacingToB",   "BfacingToA",   "facingRate",
};

// Segment-level scalar features, in canonical order.
inline constexpr std::array<std::string_view, 16> kScalarNames = {
    "fastHandPct",      "timeToPeakHandVel", "handJerkMin",     "timeToPeakArmExt",
    "armRetraction0p2s", "elbowFlexPctL",    "elbowFlexPctR",   "iouPeak",
    "iouDrop0p2s",      "handTowardPct",     "handToTorsoMin",  "closeHandPct",
    "handToHipMin",     "fastAndClosePct",   "fastAndCloseLongest", "postContactSepMean",
};

inline constexpr double kDefaultMissingDistance = 10.0;

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws UnknownFeature for names outside the catalog and InvalidArgument
  // for duplicates. Aliases are canonicalized.
  explicit FeatureSchema(std::vector<std::string> names, std::string version = std::string(kSchemaVersion));

  // Every catalog feature: series statistics first, then scalars.
  static const FeatureSchema& full();

  const std::vector<std::string>& names() const { return names_; }
  const std::string& version() const { return version_; }
  std::size_t size() const { return names_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  // Position of each name inside FeatureSchema::full().
  const std::vector<std::size_t>& catalog_indices() const { return catalog_indices_; }

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.version_ == b.version_ && a.names_ == b.names_;
  }

 private:
  std::string version_{kSchemaVersion};
  std::vector<std::string> names_;
  std::vector<std::size_t> catalog_indices_;
};

// Maps published spellings onto catalog names: "dist_p95" -> "distance_p95",
// "distancet_max" -> "distance_max", "AB_handTowardGt07Pct" -> "handTowardPct".
std::string canonical_feature_name(std::string_view name);

bool is_catalog_feature(std::string_view name);

FeatureKind feature_kind(std::string_view name);

double missing_sentinel(std::string_view name, double missing_distance = kDefaultMissingDistance);

}  // namespace posewatch
