// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#include "moma/error.hpp"

namespace moma {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNoValidPixels: return "NoValidPixels";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyAfterPairing: return "EmptyAfterPairing";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kDegenerateMAD: return "DegenerateMAD";
    case ErrorCode::kDegenerateDesign: return "DegenerateDesign";
    case ErrorCode::kZeroFocal: return "ZeroFocal";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptyScene: return "EmptyScene";
    case ErrorCode::kDegenerateG: return "DegenerateG";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

}  // namespace moma
