#include "rpcacc/error.hpp"

namespace rpcacc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kMalformedTag: return "MalformedTag";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kMalformedWire: return "MalformedWire";
    case ErrorCode::kDepthExceeded: return "DepthExceeded";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kDuplicateFieldNumber: return "DuplicateFieldNumber";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kUnresolvedReference: return "UnresolvedReference";
    case ErrorCode::kAccOnDirectField: return "AccOnDirectField";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kOutOfChunks: return "OutOfChunks";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kUnallocatedAccess: return "UnallocatedAccess";
    case ErrorCode::kUnknownProfile: return "UnknownProfile";
    case ErrorCode::kUnknownClassId: return "UnknownClassId";
    case ErrorCode::kDanglingHandle: return "DanglingHandle";
    case ErrorCode::kBadAccPtr: return "BadAccPtr";
    case ErrorCode::kCuBusy: return "CuBusy";
    case ErrorCode::kCuUnprogrammed: return "CuUnprogrammed";
    case ErrorCode::kRingFull: return "RingFull";
    case ErrorCode::kDescriptorInvalid: return "DescriptorInvalid";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace rpcacc
