// Copyright 2026 The moma-depth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace moma {

enum class ErrorCode {
  kInvalidArgument = 1,
  kNoValidPixels,
  kDimensionMismatch,
  kEmptyAfterPairing,
  kDegenerateRange,
  kDegenerateMAD,
  kDegenerateDesign,
  kZeroFocal,
  kNonFinite,
  kEmptyScene,
  kDegenerateG,
  kIo,
  kParse,
};

const char* error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// C API maps them 1:1 onto moma_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace moma
