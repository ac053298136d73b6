// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/error.hpp"

namespace vdi {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kUnsupportedVoxelType: return "UnsupportedVoxelType";
    case ErrorCode::kDegenerateW: return "DegenerateW";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kTruncatedFrame: return "TruncatedFrame";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kDecompressFailure: return "DecompressFailure";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace vdi
