#include "posewatch/schema.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "posewatch/error.hpp"

namespace posewatch {

namespace {

FeatureKind base_kind(std::string_view base) {
  if (base == "distance" || base == "handToTorso" || base == "handToHip" ||
      base == "handToTorsoMin" || base == "handToHipMin" || base == "postContactSepMean") {
    return FeatureKind::kDistance;
  }
  if (base == "iou" || base == "iouPeak") return FeatureKind::kIou;
  if (base == "handTowardCos" || base == "AfacingToB" || base == "BfacingToA") {
    return FeatureKind::kCosine;
  }
  if (base == "fastHandPct" || base == "elbowFlexPctL" || base == "elbowFlexPctR" ||
      base == "handTowardPct" || base == "closeHandPct" || base == "fastAndClosePct") {
    return FeatureKind::kPercentage;
  }
  return FeatureKind::kOther;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (auto series : kSeriesNames) {
    for (auto stat : kSeriesStatistics) {
      names.push_back(std::string(series) + "_" + std::string(stat));
    }
  }
  for (auto scalar : kScalarNames) names.emplace_back(scalar);
  return names;
}

const std::unordered_map<std::string, std::size_t>& catalog_lookup() {
  static const auto lookup = [] {
    std::unordered_map<std::string, std::size_t> m;
    const auto names = catalog_names();
    for (std::size_t i = 0; i < names.size(); ++i) m.emplace(names[i], i);
    return m;
  }();
  return lookup;
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<std::string> names, std::string version)
    : version_(std::move(version)) {
  std::set<std::string> seen;
  const auto& lookup = catalog_lookup();
  for (auto& raw : names) {
    auto name = canonical_feature_name(raw);
    auto it = lookup.find(name);
    if (it == lookup.end()) {
      throw Error(ErrorCode::kUnknownFeature, "'" + raw + "' is not a catalog feature");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate feature '" + name + "'");
    }
    catalog_indices_.push_back(it->second);
    names_.push_back(std::move(name));
  }
}

const FeatureSchema& FeatureSchema::full() {
  static const FeatureSchema schema(catalog_names());
  return schema;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::string canonical_feature_name(std::string_view name) {
  if (name.starts_with("AB_")) name.remove_prefix(3);
  if (name.starts_with("dist_")) return "distance_" + std::string(name.substr(5));
  if (name.starts_with("distancet_")) return "distance_" + std::string(name.substr(10));
  if (name == "handTowardGt07Pct") return "handTowardPct";
  return std::string(name);
}

bool is_catalog_feature(std::string_view name) {
  return catalog_lookup().contains(std::string(name));
}

FeatureKind feature_kind(std::string_view name) {
  for (auto stat : kSeriesStatistics) {
    const auto suffix = "_" + std::string(stat);
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      return base_kind(name.substr(0, name.size() - suffix.size()));
    }
  }
  return base_kind(name);
}

double missing_sentinel(std::string_view name, double missing_distance) {
  return feature_kind(name) == FeatureKind::kDistance ? missing_distance : 0.0;
}

}  // namespace posewatch
