#include "rpcacc/reference.hpp"

namespace rpcacc {

namespace {

const wire::Bytes& inline_bytes_or_throw(const BytesValue& v) {
  if (!v.is_inline()) {
    throw Error(ErrorCode::kDanglingHandle, "reference codec needs inline graphs");
  }
  return v.inline_bytes;
}

void encode_msg(const MessageValue& msg, const SchemaTable& table, wire::Bytes& out);

void encode_slot(const FieldDescriptor& desc, const FieldSlot& slot, const SchemaTable& table,
                 wire::Bytes& out) {
  if (slot_is_default(desc, slot)) return;
  if (desc.label == Label::kRepeated) {
    if (desc.type == ScalarType::kMessage) {
      for (const auto& e : std::get<RepMessages>(slot).elems) {
        wire::Bytes child;
        if (e.msg) encode_msg(*e.msg, table, child);
        wire::encode_len_field(desc.number, child, out);
      }
    } else if (is_len_delimited_type(desc.type)) {
      for (const auto& e : std::get<RepBytes>(slot).elems) {
        wire::encode_len_field(desc.number, inline_bytes_or_throw(e), out);
      }
    } else {
      const auto& elems = std::get<RepScalars>(slot).elems;
      wire::encode_packed_field(desc.number, desc.type, elems, out);
    }
    return;
  }
  switch (desc.type) {
    case ScalarType::kString:
    case ScalarType::kBytes:
      wire::encode_len_field(desc.number, inline_bytes_or_throw(std::get<BytesValue>(slot)), out);
      break;
    case ScalarType::kMessage: {
      wire::Bytes child;
      encode_msg(*std::get<SubMessage>(slot).msg, table, child);
      wire::encode_len_field(desc.number, child, out);
      break;
    }
    default:
      wire::encode_scalar_field(desc.number, desc.type, std::get<ScalarValue>(slot), out);
      break;
  }
}

void encode_msg(const MessageValue& msg, const SchemaTable& table, wire::Bytes& out) {
  const MessageSchema& schema = table.at(msg.class_id);
  if (msg.slots.size() != schema.fields.size()) {
    throw Error(ErrorCode::kTypeMismatch, "slot count does not match schema '" + schema.name + "'");
  }
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    encode_slot(schema.fields[i], msg.slots[i], table, out);
  }
}

MessageValue decode_msg(wire::ByteView buf, std::uint16_t class_id, const SchemaTable& table,
                        int depth) {
  if (depth > kMaxDecodeDepth) {
    throw Error(ErrorCode::kDepthExceeded, "nesting deeper than " + std::to_string(kMaxDecodeDepth));
  }
  const MessageSchema& schema = table.at(class_id);
  MessageValue msg(schema);
  std::size_t pos = 0;
  while (pos < buf.size()) {
    wire::DecodedField f = wire::decode_field(buf.subspan(pos), schema);
    pos += f.consumed;
    if (f.desc == nullptr) continue;  // unknown field skipped
    std::size_t idx = schema.field_index(f.field_number);
    FieldSlot& slot = msg.slots[idx];
    const FieldDescriptor& desc = *f.desc;
    if (desc.label == Label::kRepeated) {
      if (desc.type == ScalarType::kMessage) {
        SubMessage e;
        e.msg = std::make_unique<MessageValue>(
            decode_msg(f.payload, desc.message_class_id, table, depth + 1));
        std::get<RepMessages>(slot).elems.push_back(std::move(e));
      } else if (is_len_delimited_type(desc.type)) {
        std::get<RepBytes>(slot).elems.push_back(
            BytesValue::of(wire::Bytes(f.payload.begin(), f.payload.end())));
      } else {
        auto elems = wire::decode_packed_payload(desc.type, f.payload);
        auto& dst = std::get<RepScalars>(slot).elems;
        dst.insert(dst.end(), elems.begin(), elems.end());
      }
    } else if (desc.type == ScalarType::kMessage) {
      SubMessage e;
      e.msg = std::make_unique<MessageValue>(
          decode_msg(f.payload, desc.message_class_id, table, depth + 1));
      slot = std::move(e);
    } else if (is_len_delimited_type(desc.type)) {
      slot = BytesValue::of(wire::Bytes(f.payload.begin(), f.payload.end()));
    } else {
      slot = f.scalar;
    }
  }
  return msg;
}

}  // namespace

wire::Bytes ref_encode(const MessageValue& msg, const SchemaTable& table) {
  wire::Bytes out;
  encode_msg(msg, table, out);
  return out;
}

MessageValue ref_decode(wire::ByteView buf, std::uint16_t class_id, const SchemaTable& table) {
  return decode_msg(buf, class_id, table, 0);
}

std::size_t ref_encoded_size(const MessageValue& msg, const SchemaTable& table) {
  return ref_encode(msg, table).size();
}

}  // namespace rpcacc
