#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rpcacc/schema.hpp"

namespace rpcacc::wire {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// On-wire type codes (3 bits of the tag). Values match the proto3 binary
// format; groups (3/4) are unsupported and rejected.
enum class WireType : std::uint8_t {
  kVarint = 0,
  kFixed64 = 1,
  kLenDelimited = 2,
  kFixed32 = 5,
};

struct FieldTag {
  std::uint32_t field_number = 0;
  WireType wire_type = WireType::kVarint;
};

constexpr std::uint32_t kMaxFieldNumber = (1u << 29) - 1;
constexpr int kMaxVarintBytes = 10;

// --- varint ---------------------------------------------------------------

void encode_varint(std::uint64_t value, Bytes& out);
Bytes encode_varint(std::uint64_t value);

struct VarintResult {
  std::uint64_t value = 0;
  std::size_t consumed = 0;
};

// Throws Truncated when the continuation bit runs off the buffer, Overflow
// when the encoding exceeds 10 bytes or 64 value bits.
VarintResult decode_varint(ByteView buf);

// Number of bytes encode_varint will produce.
std::size_t varint_length(std::uint64_t value);

// --- fixed-width ----------------------------------------------------------

void put_fixed32(std::uint32_t value, Bytes& out);
void put_fixed64(std::uint64_t value, Bytes& out);
std::uint32_t get_fixed32(ByteView buf);  // throws Truncated
std::uint64_t get_fixed64(ByteView buf);  // throws Truncated

// --- tags -----------------------------------------------------------------

std::uint32_t make_tag(std::uint32_t field_number, WireType type);
void encode_tag(std::uint32_t field_number, WireType type, Bytes& out);

struct TagResult {
  FieldTag tag;
  std::size_t consumed = 0;
};

// Throws MalformedTag on wire types 3/4/6/7 or field number 0.
TagResult decode_tag(ByteView buf);

// Wire type used when encoding a value of the given scalar kind. Repeated
// scalars are packed, so anything repeated goes length-delimited.
WireType wire_type_for(ScalarType type, Label label);

// --- scalar <-> wire conversions -------------------------------------------

// Raw 64-bit image of a scalar as it travels in a varint or fixed field.
std::uint64_t scalar_to_wire(ScalarType type, const ScalarValue& value);
ScalarValue scalar_from_wire(ScalarType type, std::uint64_t raw);

// --- single-field encode --------------------------------------------------

// TV layout for direct scalar kinds, TLV for everything length-delimited.
void encode_scalar_field(std::uint32_t field_number, ScalarType type, const ScalarValue& value,
                         Bytes& out);
void encode_len_field(std::uint32_t field_number, ByteView payload, Bytes& out);
void encode_packed_field(std::uint32_t field_number, ScalarType elem_type,
                         std::span<const ScalarValue> elems, Bytes& out);

// Convenience wrapper matching the descriptor; throws TypeMismatch when the
// value kind does not match the declared type.
void encode_field(const FieldDescriptor& desc, const ScalarValue& value, Bytes& out);
void encode_field(const FieldDescriptor& desc, ByteView payload, Bytes& out);

// Packed payload bytes without tag/length framing (the packed TLV body).
void encode_packed_payload(ScalarType elem_type, std::span<const ScalarValue> elems, Bytes& out);
std::vector<ScalarValue> decode_packed_payload(ScalarType elem_type, ByteView payload);

// --- single-field decode ----------------------------------------------------

struct DecodedField {
  std::uint32_t field_number = 0;
  WireType wire_type = WireType::kVarint;
  const FieldDescriptor* desc = nullptr;  // null when the field is unknown and was skipped
  ScalarValue scalar{};                   // set for known direct scalar values
  ByteView payload{};                     // set for length-delimited fields
  std::size_t consumed = 0;
};

// Decodes one field at the head of `buf`. Unknown field numbers are skipped
// by wire type and reported with desc == nullptr so the caller still
// advances. Throws Truncated / MalformedTag / TypeMismatch.
DecodedField decode_field(ByteView buf, const MessageSchema& schema);

// Bytes consumed by one field of the given wire type (tag excluded).
std::size_t skip_field_body(WireType type, ByteView buf);

}  // namespace rpcacc::wire
