// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vdi {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kSizeMismatch,
  kUnsupportedVoxelType,
  kDegenerateW,
  kBadMagic,
  kVersionMismatch,
  kTruncatedStream,
  kInvariantViolation,
  kTruncatedFrame,
  kUnknownType,
  kDecompressFailure,
  kDimensionMismatch,
};

const char* to_string(ErrorCode code);

/// Exception type used across the library. The code lets callers (the CLI in
/// particular) map failures onto exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vdi
