#include "rpcacc/message.hpp"

#include <bit>
#include <cstring>

namespace rpcacc {

MessageValue::MessageValue(const MessageSchema& schema) : class_id(schema.class_id) {
  slots.reserve(schema.fields.size());
  for (const auto& f : schema.fields) {
    slots.push_back(default_slot(f));
  }
}

FieldSlot default_slot(const FieldDescriptor& desc) {
  if (desc.label == Label::kRepeated) {
    if (desc.type == ScalarType::kMessage) return RepMessages{};
    if (is_len_delimited_type(desc.type)) return RepBytes{};
    return RepScalars{};
  }
  switch (desc.type) {
    case ScalarType::kInt32: return ScalarValue(std::int32_t{0});
    case ScalarType::kInt64: return ScalarValue(std::int64_t{0});
    case ScalarType::kUInt64: return ScalarValue(std::uint64_t{0});
    case ScalarType::kDouble: return ScalarValue(0.0);
    case ScalarType::kFloat: return ScalarValue(0.0f);
    case ScalarType::kBool: return ScalarValue(false);
    case ScalarType::kString:
    case ScalarType::kBytes: return BytesValue{};
    case ScalarType::kMessage: return SubMessage{};
  }
  return ScalarValue(std::int64_t{0});
}

namespace {

bool scalar_bits_equal(const ScalarValue& a, const ScalarValue& b) {
  if (a.index() != b.index()) return false;
  // Floats compare by bit pattern so that the comparison matches the wire.
  if (std::holds_alternative<double>(a)) {
    return std::bit_cast<std::uint64_t>(std::get<double>(a)) ==
           std::bit_cast<std::uint64_t>(std::get<double>(b));
  }
  if (std::holds_alternative<float>(a)) {
    return std::bit_cast<std::uint32_t>(std::get<float>(a)) ==
           std::bit_cast<std::uint32_t>(std::get<float>(b));
  }
  return a == b;
}

bool scalar_is_zero(const ScalarValue& v) {
  return std::visit([](auto x) { return x == decltype(x){}; }, v);
}

}  // namespace

bool slot_is_default(const FieldDescriptor& desc, const FieldSlot& slot) {
  if (desc.label == Label::kRepeated) {
    if (const auto* rs = std::get_if<RepScalars>(&slot)) return rs->elems.empty();
    if (const auto* rb = std::get_if<RepBytes>(&slot)) return rb->elems.empty();
    if (const auto* rm = std::get_if<RepMessages>(&slot)) return rm->elems.empty();
    return true;
  }
  switch (desc.type) {
    case ScalarType::kString:
    case ScalarType::kBytes: {
      const auto& b = std::get<BytesValue>(slot);
      return b.is_inline() ? b.inline_bytes.empty() : b.handle.len == 0;
    }
    case ScalarType::kMessage:
      return std::get<SubMessage>(slot).msg == nullptr;
    default:
      return scalar_is_zero(std::get<ScalarValue>(slot));
  }
}

MessageValue MessageValue::clone() const {
  MessageValue out;
  out.class_id = class_id;
  out.slots.reserve(slots.size());
  for (const auto& s : slots) {
    if (const auto* sub = std::get_if<SubMessage>(&s)) {
      SubMessage copy;
      copy.record = sub->record;
      if (sub->msg) copy.msg = std::make_unique<MessageValue>(sub->msg->clone());
      out.slots.push_back(std::move(copy));
    } else if (const auto* rm = std::get_if<RepMessages>(&s)) {
      RepMessages copy;
      copy.slots = rm->slots;
      for (const auto& e : rm->elems) {
        SubMessage ec;
        ec.record = e.record;
        if (e.msg) ec.msg = std::make_unique<MessageValue>(e.msg->clone());
        copy.elems.push_back(std::move(ec));
      }
      out.slots.push_back(std::move(copy));
    } else if (const auto* v = std::get_if<ScalarValue>(&s)) {
      out.slots.push_back(*v);
    } else if (const auto* b = std::get_if<BytesValue>(&s)) {
      out.slots.push_back(*b);
    } else if (const auto* rs = std::get_if<RepScalars>(&s)) {
      out.slots.push_back(*rs);
    } else if (const auto* rb = std::get_if<RepBytes>(&s)) {
      out.slots.push_back(*rb);
    }
  }
  return out;
}

wire::Bytes bytes_of(const BytesValue& v, const MemoryModel& mem) {
  if (v.is_inline()) return v.inline_bytes;
  return mem.read(v.handle);
}

MessageValue materialize(const MessageValue& msg, const MemoryModel& mem,
                         const SchemaTable& table) {
  MessageValue out;
  out.class_id = msg.class_id;
  out.slots.reserve(msg.slots.size());
  for (const auto& s : msg.slots) {
    if (const auto* b = std::get_if<BytesValue>(&s)) {
      out.slots.push_back(BytesValue::of(bytes_of(*b, mem)));
    } else if (const auto* sub = std::get_if<SubMessage>(&s)) {
      SubMessage copy;
      if (sub->msg) {
        copy.msg = std::make_unique<MessageValue>(materialize(*sub->msg, mem, table));
      }
      out.slots.push_back(std::move(copy));
    } else if (const auto* rb = std::get_if<RepBytes>(&s)) {
      RepBytes copy;
      for (const auto& e : rb->elems) copy.elems.push_back(BytesValue::of(bytes_of(e, mem)));
      out.slots.push_back(std::move(copy));
    } else if (const auto* rm = std::get_if<RepMessages>(&s)) {
      RepMessages copy;
      for (const auto& e : rm->elems) {
        SubMessage ec;
        if (e.msg) ec.msg = std::make_unique<MessageValue>(materialize(*e.msg, mem, table));
        copy.elems.push_back(std::move(ec));
      }
      out.slots.push_back(std::move(copy));
    } else if (const auto* rs = std::get_if<RepScalars>(&s)) {
      RepScalars copy;
      copy.elems = rs->elems;
      out.slots.push_back(std::move(copy));
    } else {
      out.slots.push_back(std::get<ScalarValue>(s));
    }
  }
  return out;
}

bool struct_equal(const MessageValue& a, const MessageValue& b) {
  if (a.class_id != b.class_id || a.slots.size() != b.slots.size()) return false;
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    const FieldSlot& sa = a.slots[i];
    const FieldSlot& sb = b.slots[i];
    if (sa.index() != sb.index()) return false;
    if (const auto* va = std::get_if<ScalarValue>(&sa)) {
      if (!scalar_bits_equal(*va, std::get<ScalarValue>(sb))) return false;
    } else if (const auto* ba = std::get_if<BytesValue>(&sa)) {
      const auto& bb = std::get<BytesValue>(sb);
      if (!ba->is_inline() || !bb.is_inline()) {
        throw Error(ErrorCode::kDanglingHandle, "struct_equal needs inline graphs");
      }
      if (ba->inline_bytes != bb.inline_bytes) return false;
    } else if (const auto* ma = std::get_if<SubMessage>(&sa)) {
      const auto& mb = std::get<SubMessage>(sb);
      if ((ma->msg == nullptr) != (mb.msg == nullptr)) return false;
      if (ma->msg && !struct_equal(*ma->msg, *mb.msg)) return false;
    } else if (const auto* ra = std::get_if<RepScalars>(&sa)) {
      const auto& rb = std::get<RepScalars>(sb);
      if (ra->elems.size() != rb.elems.size()) return false;
      for (std::size_t j = 0; j < ra->elems.size(); ++j) {
        if (!scalar_bits_equal(ra->elems[j], rb.elems[j])) return false;
      }
    } else if (const auto* rba = std::get_if<RepBytes>(&sa)) {
      const auto& rbb = std::get<RepBytes>(sb);
      if (rba->elems.size() != rbb.elems.size()) return false;
      for (std::size_t j = 0; j < rba->elems.size(); ++j) {
        if (!rba->elems[j].is_inline() || !rbb.elems[j].is_inline()) {
          throw Error(ErrorCode::kDanglingHandle, "struct_equal needs inline graphs");
        }
        if (rba->elems[j].inline_bytes != rbb.elems[j].inline_bytes) return false;
      }
    } else if (const auto* rma = std::get_if<RepMessages>(&sa)) {
      const auto& rmb = std::get<RepMessages>(sb);
      if (rma->elems.size() != rmb.elems.size()) return false;
      for (std::size_t j = 0; j < rma->elems.size(); ++j) {
        if ((rma->elems[j].msg == nullptr) != (rmb.elems[j].msg == nullptr)) return false;
        if (rma->elems[j].msg && !struct_equal(*rma->elems[j].msg, *rmb.elems[j].msg)) {
          return false;
        }
      }
    }
  }
  return true;
}

std::size_t slot_width(const FieldDescriptor& desc) {
  if (desc.addressing() == Addressing::kDereference) return kDerefSlotSize;
  return scalar_width(desc.type);
}

std::size_t record_size(const MessageSchema& schema) {
  std::size_t n = 0;
  for (const auto& f : schema.fields) n += slot_width(f);
  return n;
}

std::size_t slot_offset(const MessageSchema& schema, std::size_t field_index) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < field_index; ++i) off += slot_width(schema.fields[i]);
  return off;
}

void pack_deref_slot(const MemHandle& h, std::uint8_t* dst) {
  std::memset(dst, 0, kDerefSlotSize);
  dst[0] = static_cast<std::uint8_t>(h.region);
  for (int i = 0; i < 4; ++i) dst[4 + i] = static_cast<std::uint8_t>(h.len >> (8 * i));
  for (int i = 0; i < 8; ++i) dst[8 + i] = static_cast<std::uint8_t>(h.addr >> (8 * i));
}

MemHandle unpack_deref_slot(const std::uint8_t* src) {
  MemHandle h;
  h.region = static_cast<Region>(src[0]);
  h.len = 0;
  h.addr = 0;
  for (int i = 0; i < 4; ++i) h.len |= static_cast<std::uint32_t>(src[4 + i]) << (8 * i);
  for (int i = 0; i < 8; ++i) h.addr |= static_cast<std::uint64_t>(src[8 + i]) << (8 * i);
  return h;
}

void write_scalar_slot(ScalarType type, const ScalarValue& value, std::uint8_t* dst) {
  std::uint64_t raw = 0;
  switch (type) {
    case ScalarType::kInt32:
      raw = static_cast<std::uint32_t>(std::get<std::int32_t>(value));
      break;
    case ScalarType::kInt64:
      raw = static_cast<std::uint64_t>(std::get<std::int64_t>(value));
      break;
    case ScalarType::kUInt64:
      raw = std::get<std::uint64_t>(value);
      break;
    case ScalarType::kDouble:
      raw = std::bit_cast<std::uint64_t>(std::get<double>(value));
      break;
    case ScalarType::kFloat:
      raw = std::bit_cast<std::uint32_t>(std::get<float>(value));
      break;
    case ScalarType::kBool:
      raw = std::get<bool>(value) ? 1 : 0;
      break;
    default:
      throw Error(ErrorCode::kTypeMismatch, "dereference kind has no scalar slot");
  }
  std::size_t width = scalar_width(type);
  for (std::size_t i = 0; i < width; ++i) {
    dst[i] = static_cast<std::uint8_t>(raw >> (8 * i));
  }
}

ScalarValue read_scalar_slot(ScalarType type, const std::uint8_t* src) {
  std::uint64_t raw = 0;
  std::size_t width = scalar_width(type);
  for (std::size_t i = 0; i < width; ++i) {
    raw |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  }
  switch (type) {
    case ScalarType::kInt32:
      return static_cast<std::int32_t>(static_cast<std::uint32_t>(raw));
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
      throw Error(ErrorCode::kTypeMismatch, "dereference kind has no scalar slot");
  }
}

}  // namespace rpcacc
