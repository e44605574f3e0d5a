#include "rpcacc/wire.hpp"

#include <bit>
#include <cstring>

namespace rpcacc::wire {

void encode_varint(std::uint64_t value, Bytes& out) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value) | 0x80);
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

Bytes encode_varint(std::uint64_t value) {
  Bytes out;
  encode_varint(value, out);
  return out;
}

std::size_t varint_length(std::uint64_t value) {
  std::size_t n = 1;
  while (value >= 0x80) {
    value >>= 7;
    ++n;
  }
  return n;
}

VarintResult decode_varint(ByteView buf) {
  std::uint64_t value = 0;
  int shift = 0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    if (i >= kMaxVarintBytes) {
      throw Error(ErrorCode::kOverflow, "varint longer than 10 bytes");
    }
    std::uint8_t byte = buf[i];
    if (shift == 63 && (byte & 0x7E) != 0) {
      // 10th byte may only carry the top bit of a 64-bit value.
      throw Error(ErrorCode::kOverflow, "varint exceeds 64 bits");
    }
    value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) {
      return {value, i + 1};
    }
    shift += 7;
  }
  throw Error(ErrorCode::kTruncated, "varint continuation past end of buffer");
}

void put_fixed32(std::uint32_t value, Bytes& out) {
  out.push_back(static_cast<std::uint8_t>(value));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 24));
}

void put_fixed64(std::uint64_t value, Bytes& out) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

std::uint32_t get_fixed32(ByteView buf) {
  if (buf.size() < 4) throw Error(ErrorCode::kTruncated, "fixed32 needs 4 bytes");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t get_fixed64(ByteView buf) {
  if (buf.size() < 8) throw Error(ErrorCode::kTruncated, "fixed64 needs 8 bytes");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::uint32_t make_tag(std::uint32_t field_number, WireType type) {
  return (field_number << 3) | static_cast<std::uint32_t>(type);
}

void encode_tag(std::uint32_t field_number, WireType type, Bytes& out) {
  encode_varint(make_tag(field_number, type), out);
}

TagResult decode_tag(ByteView buf) {
  VarintResult raw = decode_varint(buf);
  std::uint32_t type_bits = static_cast<std::uint32_t>(raw.value & 0x7);
  std::uint64_t number = raw.value >> 3;
  if (type_bits == 3 || type_bits == 4 || type_bits > 5) {
    throw Error(ErrorCode::kMalformedTag, "wire type " + std::to_string(type_bits));
  }
  if (number == 0 || number > kMaxFieldNumber) {
    throw Error(ErrorCode::kMalformedTag, "field number " + std::to_string(number));
  }
  return {{static_cast<std::uint32_t>(number), static_cast<WireType>(type_bits)}, raw.consumed};
}

WireType wire_type_for(ScalarType type, Label label) {
  if (label == Label::kRepeated || is_len_delimited_type(type)) {
    return WireType::kLenDelimited;
  }
  switch (type) {
    case ScalarType::kDouble: return WireType::kFixed64;
    case ScalarType::kFloat: return WireType::kFixed32;
    default: return WireType::kVarint;
  }
}

std::uint64_t scalar_to_wire(ScalarType type, const ScalarValue& value) {
  switch (type) {
    case ScalarType::kInt32:
      // Negative int32 sign-extends to a 10-byte varint, proto3 behavior.
      return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::get<std::int32_t>(value)));
    case ScalarType::kInt64:
      return static_cast<std::uint64_t>(std::get<std::int64_t>(value));
    case ScalarType::kUInt64:
      return std::get<std::uint64_t>(value);
    case ScalarType::kDouble:
      return std::bit_cast<std::uint64_t>(std::get<double>(value));
    case ScalarType::kFloat:
      return std::bit_cast<std::uint32_t>(std::get<float>(value));
    case ScalarType::kBool:
      return std::get<bool>(value) ? 1 : 0;
    default:
      throw Error(ErrorCode::kTypeMismatch,
                  std::string(scalar_type_name(type)) + " is not a direct scalar");
  }
}

ScalarValue scalar_from_wire(ScalarType type, std::uint64_t raw) {
  switch (type) {
    case ScalarType::kInt32:
      return static_cast<std::int32_t>(raw);
    case ScalarType::kInt64:
      return static_cast<std::int64_t>(raw);
    case ScalarType::kUInt64:
      return raw;
    case ScalarType::kDouble:
      return std::bit_cast<double>(raw);
    case ScalarType::kFloat:
      return std::bit_cast<float>(static_cast<std::uint32_t>(raw));
    case ScalarType::kBool:
      return raw != 0;
    default:
      throw Error(ErrorCode::kTypeMismatch,
                  std::string(scalar_type_name(type)) + " is not a direct scalar");
  }
}

namespace {

bool scalar_kind_matches(ScalarType type, const ScalarValue& value) {
  switch (type) {
    case ScalarType::kInt32: return std::holds_alternative<std::int32_t>(value);
    case ScalarType::kInt64: return std::holds_alternative<std::int64_t>(value);
    case ScalarType::kUInt64: return std::holds_alternative<std::uint64_t>(value);
    case ScalarType::kDouble: return std::holds_alternative<double>(value);
    case ScalarType::kFloat: return std::holds_alternative<float>(value);
    case ScalarType::kBool: return std::holds_alternative<bool>(value);
    default: return false;
  }
}

}  // namespace

void encode_scalar_field(std::uint32_t field_number, ScalarType type, const ScalarValue& value,
                         Bytes& out) {
  if (!scalar_kind_matches(type, value)) {
    throw Error(ErrorCode::kTypeMismatch,
                "value kind does not match declared " + std::string(scalar_type_name(type)));
  }
  WireType wt = wire_type_for(type, Label::kSingular);
  encode_tag(field_number, wt, out);
  std::uint64_t raw = scalar_to_wire(type, value);
  switch (wt) {
    case WireType::kVarint: encode_varint(raw, out); break;
    case WireType::kFixed64: put_fixed64(raw, out); break;
    case WireType::kFixed32: put_fixed32(static_cast<std::uint32_t>(raw), out); break;
    default: break;
  }
}

void encode_len_field(std::uint32_t field_number, ByteView payload, Bytes& out) {
  encode_tag(field_number, WireType::kLenDelimited, out);
  encode_varint(payload.size(), out);
  out.insert(out.end(), payload.begin(), payload.end());
}

void encode_packed_payload(ScalarType elem_type, std::span<const ScalarValue> elems, Bytes& out) {
  for (const auto& e : elems) {
    std::uint64_t raw = scalar_to_wire(elem_type, e);
    switch (wire_type_for(elem_type, Label::kSingular)) {
      case WireType::kVarint: encode_varint(raw, out); break;
      case WireType::kFixed64: put_fixed64(raw, out); break;
      case WireType::kFixed32: put_fixed32(static_cast<std::uint32_t>(raw), out); break;
      default: break;
    }
  }
}

void encode_packed_field(std::uint32_t field_number, ScalarType elem_type,
                         std::span<const ScalarValue> elems, Bytes& out) {
  Bytes payload;
  encode_packed_payload(elem_type, elems, payload);
  encode_len_field(field_number, payload, out);
}

std::vector<ScalarValue> decode_packed_payload(ScalarType elem_type, ByteView payload) {
  std::vector<ScalarValue> elems;
  std::size_t pos = 0;
  WireType wt = wire_type_for(elem_type, Label::kSingular);
  while (pos < payload.size()) {
    std::uint64_t raw = 0;
    switch (wt) {
      case WireType::kVarint: {
        VarintResult r = decode_varint(payload.subspan(pos));
        raw = r.value;
        pos += r.consumed;
        break;
      }
      case WireType::kFixed64:
        raw = get_fixed64(payload.subspan(pos));
        pos += 8;
        break;
      case WireType::kFixed32:
        raw = get_fixed32(payload.subspan(pos));
        pos += 4;
        break;
      default:
        throw Error(ErrorCode::kTypeMismatch, "packed payload of non-scalar kind");
    }
    elems.push_back(scalar_from_wire(elem_type, raw));
  }
  return elems;
}

void encode_field(const FieldDescriptor& desc, const ScalarValue& value, Bytes& out) {
  if (desc.label == Label::kRepeated || is_len_delimited_type(desc.type)) {
    throw Error(ErrorCode::kTypeMismatch,
                "field '" + desc.name + "' is not a singular direct scalar");
  }
  encode_scalar_field(desc.number, desc.type, value, out);
}

void encode_field(const FieldDescriptor& desc, ByteView payload, Bytes& out) {
  if (!is_len_delimited_type(desc.type) && desc.label != Label::kRepeated) {
    throw Error(ErrorCode::kTypeMismatch, "field '" + desc.name + "' is not length-delimited");
  }
  encode_len_field(desc.number, payload, out);
}

std::size_t skip_field_body(WireType type, ByteView buf) {
  switch (type) {
    case WireType::kVarint:
      return decode_varint(buf).consumed;
    case WireType::kFixed64:
      if (buf.size() < 8) throw Error(ErrorCode::kTruncated, "fixed64 body");
      return 8;
    case WireType::kFixed32:
      if (buf.size() < 4) throw Error(ErrorCode::kTruncated, "fixed32 body");
      return 4;
    case WireType::kLenDelimited: {
      VarintResult len = decode_varint(buf);
      if (buf.size() - len.consumed < len.value) {
        throw Error(ErrorCode::kTruncated, "length-delimited body");
      }
      return len.consumed + static_cast<std::size_t>(len.value);
    }
  }
  throw Error(ErrorCode::kMalformedTag, "unknown wire type");
}

DecodedField decode_field(ByteView buf, const MessageSchema& schema) {
  DecodedField out;
  TagResult tag = decode_tag(buf);
  out.field_number = tag.tag.field_number;
  out.wire_type = tag.tag.wire_type;
  std::size_t pos = tag.consumed;

  const FieldDescriptor* desc = schema.find_field(out.field_number);
  if (desc == nullptr) {
    // Unknown field: skip its body but still report how far we advanced.
    pos += skip_field_body(out.wire_type, buf.subspan(pos));
    out.consumed = pos;
    return out;
  }

  WireType expected = wire_type_for(desc->type, desc->label);
  if (expected != out.wire_type) {
    throw Error(ErrorCode::kTypeMismatch, "field '" + desc->name + "' has wire type " +
                                              std::to_string(static_cast<int>(out.wire_type)));
  }
  out.desc = desc;
  switch (out.wire_type) {
    case WireType::kVarint: {
      VarintResult r = decode_varint(buf.subspan(pos));
      out.scalar = scalar_from_wire(desc->type, r.value);
      pos += r.consumed;
      break;
    }
    case WireType::kFixed64:
      out.scalar = scalar_from_wire(desc->type, get_fixed64(buf.subspan(pos)));
      pos += 8;
      break;
    case WireType::kFixed32:
      out.scalar = scalar_from_wire(desc->type, get_fixed32(buf.subspan(pos)));
      pos += 4;
      break;
    case WireType::kLenDelimited: {
      VarintResult len = decode_varint(buf.subspan(pos));
      pos += len.consumed;
      if (buf.size() - pos < len.value) {
        throw Error(ErrorCode::kTruncated, "payload of field '" + desc->name + "'");
      }
      out.payload = buf.subspan(pos, static_cast<std::size_t>(len.value));
      pos += static_cast<std::size_t>(len.value);
      break;
    }
  }
  out.consumed = pos;
  return out;
}

}  // namespace rpcacc::wire
