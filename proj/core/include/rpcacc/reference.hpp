#pragma once

#include "rpcacc/message.hpp"
#include "rpcacc/schema.hpp"
#include "rpcacc/wire.hpp"

namespace rpcacc {

// Cost-free software codec used as the correctness oracle for the simulated
// deserializer and all serialization strategies. It never touches the
// interconnect, the memory model, or placement bits, and shares only the
// low-level wire primitives with the simulated paths.

// Deterministic encoding: ascending field number, depth first, proto3 default
// values omitted, repeated scalars packed. Requires a fully inline graph.
wire::Bytes ref_encode(const MessageValue& msg, const SchemaTable& table);

// Inverse of ref_encode; materializes every value inline. Unknown fields are
// skipped. Throws MalformedWire-family errors on bad input and DepthExceeded
// past kMaxDecodeDepth.
MessageValue ref_decode(wire::ByteView buf, std::uint16_t class_id, const SchemaTable& table);

constexpr int kMaxDecodeDepth = 64;

// Encoded size without producing bytes (used by size-planning passes).
std::size_t ref_encoded_size(const MessageValue& msg, const SchemaTable& table);

}  // namespace rpcacc
