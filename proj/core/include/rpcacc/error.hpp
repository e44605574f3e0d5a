#pragma once

#include <stdexcept>
#include <string>

namespace rpcacc {

enum class ErrorCode {
  // wire format
  kTruncated,
  kOverflow,
  kMalformedTag,
  kTypeMismatch,
  kMalformedWire,
  kDepthExceeded,
  // schema compiler
  kSyntaxError,
  kDuplicateFieldNumber,
  kUnknownType,
  kUnresolvedReference,
  kAccOnDirectField,
  kBadMagic,
  kVersionMismatch,
  // memory model
  kOutOfChunks,
  kOutOfBounds,
  kUnallocatedAccess,
  // simulator
  kUnknownProfile,
  kUnknownClassId,
  kDanglingHandle,
  kBadAccPtr,
  kCuBusy,
  kCuUnprogrammed,
  kRingFull,
  kDescriptorInvalid,
  // harness
  kInvalidSpec,
  kUnknownScenario,
  kConfigError,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the whole library. The code is what tests and
// callers dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpcacc
