#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rpcacc/memory.hpp"
#include "rpcacc/schema.hpp"
#include "rpcacc/wire.hpp"

namespace rpcacc {

class MessageValue;
using MessagePtr = std::unique_ptr<MessageValue>;

// Value of a string/bytes field: either the bytes themselves (software
// materialized) or a handle into simulated memory.
struct BytesValue {
  wire::Bytes inline_bytes;
  MemHandle handle;  // null when inline

  bool is_inline() const { return handle.null(); }
  static BytesValue of(wire::Bytes b) { return BytesValue{std::move(b), {}}; }
  static BytesValue of(MemHandle h) { return BytesValue{{}, h}; }
  static BytesValue of_string(const std::string& s) {
    return of(wire::Bytes(s.begin(), s.end()));
  }
};

struct SubMessage {
  MessagePtr msg;        // null means field absent
  MemHandle record;      // record location when simulated, null otherwise
};

struct RepScalars {
  std::vector<ScalarValue> elems;
  MemHandle array;  // packed element array location when simulated
};

struct RepBytes {
  std::vector<BytesValue> elems;
  MemHandle slots;  // deref-slot array location when simulated
};

struct RepMessages {
  std::vector<SubMessage> elems;
  MemHandle slots;
};

using FieldSlot = std::variant<ScalarValue, BytesValue, SubMessage, RepScalars, RepMessages, RepBytes>;

// In-memory object graph of one RPC message. Slots are parallel to the
// schema's field list; dereference slots may be region-tagged handles after a
// simulated deserialization or plain bytes after a software decode.
class MessageValue {
 public:
  MessageValue() = default;
  explicit MessageValue(const MessageSchema& schema);

  std::uint16_t class_id = 0;
  std::vector<FieldSlot> slots;

  MessageValue clone() const;

  FieldSlot& slot(std::size_t index) { return slots.at(index); }
  const FieldSlot& slot(std::size_t index) const { return slots.at(index); }
};

// Default (absent) slot for a descriptor.
FieldSlot default_slot(const FieldDescriptor& desc);

// True when the slot holds the proto3 default and would not be emitted.
bool slot_is_default(const FieldDescriptor& desc, const FieldSlot& slot);

// Resolves every handle through memory, yielding a fully inline graph.
MessageValue materialize(const MessageValue& msg, const MemoryModel& mem,
                         const SchemaTable& table);

// Deep structural equality of two fully inline graphs.
bool struct_equal(const MessageValue& a, const MessageValue& b);

// Byte content of a BytesValue, reading through memory when needed.
wire::Bytes bytes_of(const BytesValue& v, const MemoryModel& mem);

// --- simulated record layout ------------------------------------------------
//
// A deserialized message class occupies a fixed-size record: direct scalars
// inline at their slot offset, dereference fields as 16-byte slots
//
//   [0]     region
//   [1..3]  reserved
//   [4..7]  length, little endian
//   [8..15] address, little endian
//
// Strings/bytes point at raw payload bytes; sub-messages point at the child
// record; repeated scalars at a packed native-width element array; repeated
// dereference fields at an array of 16-byte slots.

constexpr std::size_t kDerefSlotSize = 16;

std::size_t slot_width(const FieldDescriptor& desc);
std::size_t record_size(const MessageSchema& schema);
std::size_t slot_offset(const MessageSchema& schema, std::size_t field_index);

void pack_deref_slot(const MemHandle& h, std::uint8_t* dst);
MemHandle unpack_deref_slot(const std::uint8_t* src);

void write_scalar_slot(ScalarType type, const ScalarValue& value, std::uint8_t* dst);
ScalarValue read_scalar_slot(ScalarType type, const std::uint8_t* src);

}  // namespace rpcacc
