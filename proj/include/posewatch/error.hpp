#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posewatch {

enum class ErrorCode {
  kMalformedRecord,
  kEmptyTrack,
  kInvalidAlpha,
  kInsufficientHistory,
  kInsufficientSamples,
  kDegenerateBox,
  kNoTemporalOverlap,
  kNoValidJointPairs,
  kFacingUndefined,
  kUnknownStatistic,
  kUnknownFeature,
  kSegmentTooShort,
  kMissingClass,
  kEmptyNode,
  kSchemaMismatch,
  kVersionMismatch,
  kCorruptModel,
  kKTooLarge,
  kTooFewSamples,
  kTooManyComponents,
  kNotActivationEvent,
  kInvalidSpec,
  kInvalidConfig,
  kInvalidArgument,
  kSinkUnreachable,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posewatch
