#include "posewatch/error.hpp"

namespace posewatch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kEmptyTrack: return "EmptyTrack";
    case ErrorCode::kInvalidAlpha: return "InvalidAlpha";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kNoTemporalOverlap: return "NoTemporalOverlap";
    case ErrorCode::kNoValidJointPairs: return "NoValidJointPairs";
    case ErrorCode::kFacingUndefined: return "FacingUndefined";
    case ErrorCode::kUnknownStatistic: return "UnknownStatistic";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kSegmentTooShort: return "SegmentTooShort";
    case ErrorCode::kMissingClass: return "MissingClass";
    case ErrorCode::kEmptyNode: return "EmptyNode";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptModel: return "CorruptModel";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kTooManyComponents: return "TooManyComponents";
    case ErrorCode::kNotActivationEvent: return "NotActivationEvent";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSinkUnreachable: return "SinkUnreachable";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace posewatch
