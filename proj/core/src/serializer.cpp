#include "rpcacc/serializer.hpp"

#include <cstring>
#include <functional>

#include "rpcacc/reference.hpp"

namespace rpcacc {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCpuOnly: return "cpu-only";
    case Strategy::kAccelOnly: return "accel-only";
    case Strategy::kMemoryAffinity: return "memory-affinity";
  }
  return "?";
}

namespace {

// Pre-serialized buffer record kinds. RAW records carry unencoded values in
// depth-first field order; ACCPTR records stand in for accelerator-resident
// data the device splices in locally.
enum RecordKind : std::uint8_t {
  kRawScalar = 1,
  kRawBytes = 2,
  kRawPacked = 3,
  kMsgBegin = 4,
  kMsgEnd = 5,
  kAccPtr = 6,
};

enum PtrKind : std::uint8_t {
  kBytesPtr = 0,
  kMessagePtr = 1,
  kPackedPtr = 2,
};

void put_u32(std::uint32_t v, wire::Bytes& out) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::uint64_t v, wire::Bytes& out) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct BufReader {
  wire::ByteView buf;
  std::size_t pos = 0;

  bool done() const { return pos >= buf.size(); }

  std::uint8_t u8() {
    check(1);
    return buf[pos++];
  }
  std::uint16_t u16() {
    check(2);
    std::uint16_t v = static_cast<std::uint16_t>(buf[pos] | (buf[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    check(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    check(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  wire::ByteView bytes(std::size_t n) {
    check(n);
    wire::ByteView v = buf.subspan(pos, n);
    pos += n;
    return v;
  }
  void check(std::size_t n) const {
    if (buf.size() - pos < n) {
      throw Error(ErrorCode::kMalformedWire, "pre-serialized buffer cut short");
    }
  }
};

}  // namespace

// --- stage 1: CPU pre-serialization -----------------------------------------

namespace {

struct PreSerCtx {
  Simulation* sim;
  wire::Bytes buf;
  CpuCycleProxy proxy;
  std::uint32_t threshold;

  void copy_attributed(std::uint64_t len) {
    if (len >= threshold) {
      proxy.bytes_copied_by_memcpy_engine += len;
    } else {
      proxy.bytes_copied_by_cpu += len;
    }
  }
};

bool handle_in_acc(const MemHandle& h) { return !h.null() && h.region == Region::kAccel; }

void pre_ser_bytes_field(PreSerCtx& ctx, std::uint32_t number, const BytesValue& v) {
  ctx.proxy.fields_visited += 1;
  if (!v.is_inline() && handle_in_acc(v.handle)) {
    ctx.buf.push_back(kAccPtr);
    put_u32(number, ctx.buf);
    ctx.buf.push_back(kBytesPtr);
    ctx.buf.push_back(0);
    ctx.buf.push_back(static_cast<std::uint8_t>(v.handle.region));
    put_u32(0, ctx.buf);  // class id unused
    put_u32(v.handle.len, ctx.buf);
    put_u64(v.handle.addr, ctx.buf);
    return;
  }
  wire::Bytes bytes = bytes_of(v, ctx.sim->memory());
  ctx.buf.push_back(kRawBytes);
  put_u32(number, ctx.buf);
  put_u32(static_cast<std::uint32_t>(bytes.size()), ctx.buf);
  ctx.buf.insert(ctx.buf.end(), bytes.begin(), bytes.end());
  ctx.copy_attributed(bytes.size());
}

void pre_ser_message(PreSerCtx& ctx, const MessageValue& msg);

void pre_ser_submessage(PreSerCtx& ctx, std::uint32_t number, const SubMessage& sub) {
  ctx.proxy.fields_visited += 1;
  if (!sub.record.null() && sub.record.region == Region::kAccel) {
    ctx.buf.push_back(kAccPtr);
    put_u32(number, ctx.buf);
    ctx.buf.push_back(kMessagePtr);
    ctx.buf.push_back(0);
    ctx.buf.push_back(static_cast<std::uint8_t>(sub.record.region));
    put_u32(sub.msg ? sub.msg->class_id : 0, ctx.buf);
    put_u32(sub.record.len, ctx.buf);
    put_u64(sub.record.addr, ctx.buf);
    return;
  }
  ctx.buf.push_back(kMsgBegin);
  put_u32(number, ctx.buf);
  pre_ser_message(ctx, *sub.msg);
  ctx.buf.push_back(kMsgEnd);
}

void pre_ser_message(PreSerCtx& ctx, const MessageValue& msg) {
  const MessageSchema& schema = ctx.sim->table().at(msg.class_id);
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldDescriptor& desc = schema.fields[i];
    const FieldSlot& slot = msg.slots[i];
    if (slot_is_default(desc, slot)) continue;

    if (desc.label == Label::kRepeated) {
      if (desc.type == ScalarType::kMessage) {
        for (const auto& e : std::get<RepMessages>(slot).elems) {
          pre_ser_submessage(ctx, desc.number, e);
        }
      } else if (is_len_delimited_type(desc.type)) {
        for (const auto& e : std::get<RepBytes>(slot).elems) {
          pre_ser_bytes_field(ctx, desc.number, e);
        }
      } else {
        const auto& rep = std::get<RepScalars>(slot);
        ctx.proxy.fields_visited += 1;
        std::size_t width = scalar_width(desc.type);
        if (handle_in_acc(rep.array)) {
          ctx.buf.push_back(kAccPtr);
          put_u32(desc.number, ctx.buf);
          ctx.buf.push_back(kPackedPtr);
          ctx.buf.push_back(static_cast<std::uint8_t>(desc.type));
          ctx.buf.push_back(static_cast<std::uint8_t>(rep.array.region));
          put_u32(0, ctx.buf);
          put_u32(rep.array.len, ctx.buf);
          put_u64(rep.array.addr, ctx.buf);
        } else {
          ctx.buf.push_back(kRawPacked);
          put_u32(desc.number, ctx.buf);
          ctx.buf.push_back(static_cast<std::uint8_t>(desc.type));
          put_u32(static_cast<std::uint32_t>(rep.elems.size()), ctx.buf);
          for (const auto& e : rep.elems) {
            std::uint8_t tmp[8];
            write_scalar_slot(desc.type, e, tmp);
            ctx.buf.insert(ctx.buf.end(), tmp, tmp + width);
          }
          ctx.copy_attributed(rep.elems.size() * width);
        }
      }
      continue;
    }

    switch (desc.type) {
      case ScalarType::kString:
      case ScalarType::kBytes:
        pre_ser_bytes_field(ctx, desc.number, std::get<BytesValue>(slot));
        break;
      case ScalarType::kMessage:
        pre_ser_submessage(ctx, desc.number, std::get<SubMessage>(slot));
        break;
      default: {
        const auto& value = std::get<ScalarValue>(slot);
        ctx.proxy.fields_visited += 1;
        std::size_t width = scalar_width(desc.type);
        ctx.buf.push_back(kRawScalar);
        put_u32(desc.number, ctx.buf);
        ctx.buf.push_back(static_cast<std::uint8_t>(desc.type));
        std::uint8_t tmp[8];
        write_scalar_slot(desc.type, value, tmp);
        ctx.buf.insert(ctx.buf.end(), tmp, tmp + width);
        ctx.copy_attributed(width);
        break;
      }
    }
  }
}

}  // namespace

PreSerializeResult Serializer::pre_serialize(const MessageValue& root) {
  PreSerCtx ctx{&sim_, {}, {}, sim_.config().memcpy_threshold};
  // Leading class id lets the device resolve schemas for spliced records.
  ctx.buf.push_back(static_cast<std::uint8_t>(root.class_id));
  ctx.buf.push_back(static_cast<std::uint8_t>(root.class_id >> 8));
  pre_ser_message(ctx, root);

  PreSerializeResult result;
  std::uint64_t addr = sim_.memory().space(Region::kHost).alloc_large(ctx.buf.size());
  sim_.memory().write(Region::kHost, addr, ctx.buf);
  result.buffer.location = {Region::kHost, addr, static_cast<std::uint32_t>(ctx.buf.size())};
  result.proxy = ctx.proxy;
  result.host_ns = ctx.proxy.fields_visited * sim_.config().host.field_visit_ns +
                   static_cast<double>(ctx.proxy.bytes_copied_by_cpu) /
                       sim_.config().host.copy_bandwidth_bytes_per_ns;
  result.mmio_ns = sim_.link().mmio_write(0xA0, addr);
  return result;
}

// --- stage 2: accelerator serialization --------------------------------------

namespace {

struct DeviceCtx {
  Simulation* sim;
  double link_ns = 0.0;
  std::uint64_t dependent_reads = 0;
  std::uint64_t accel_bytes_read = 0;

  // Fetches a memory object; accelerator-local reads are free, host reads
  // are pointer chases across the link.
  wire::Bytes fetch(const MemHandle& h) {
    if (h.len == 0) return {};
    if (!sim->memory().is_allocated(h)) {
      throw Error(ErrorCode::kBadAccPtr, "pointer outside allocated memory");
    }
    if (h.region == Region::kAccel) {
      accel_bytes_read += h.len;
      return sim->memory().read(h);
    }
    double cost = 0.0;
    auto bytes = sim->link().dma_read(h.addr, h.len, cost);
    link_ns += cost;
    dependent_reads += 1;
    return bytes;
  }
};

void encode_record_from_memory(DeviceCtx& ctx, std::uint16_t class_id, const MemHandle& record,
                               int depth, wire::Bytes& out) {
  if (depth > kMaxDecodeDepth) {
    throw Error(ErrorCode::kDepthExceeded, "record graph too deep");
  }
  const MessageSchema& schema = ctx.sim->table().at(class_id);
  if (record.len == 0) return;  // empty record encodes to nothing
  wire::Bytes rec = ctx.fetch(record);
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldDescriptor& desc = schema.fields[i];
    const std::uint8_t* slot = rec.data() + slot_offset(schema, i);
    if (desc.addressing() == Addressing::kDirect) {
      ScalarValue v = read_scalar_slot(desc.type, slot);
      bool zero = std::visit([](auto x) { return x == decltype(x){}; }, v);
      if (!zero) wire::encode_scalar_field(desc.number, desc.type, v, out);
      continue;
    }
    MemHandle h = unpack_deref_slot(slot);
    if (h.null()) continue;
    if (desc.label == Label::kRepeated) {
      wire::Bytes arr = ctx.fetch(h);
      if (desc.type == ScalarType::kMessage) {
        for (std::size_t j = 0; j + kDerefSlotSize <= arr.size(); j += kDerefSlotSize) {
          MemHandle eh = unpack_deref_slot(arr.data() + j);
          wire::Bytes child;
          encode_record_from_memory(ctx, desc.message_class_id, eh, depth + 1, child);
          wire::encode_len_field(desc.number, child, out);
        }
      } else if (is_len_delimited_type(desc.type)) {
        for (std::size_t j = 0; j + kDerefSlotSize <= arr.size(); j += kDerefSlotSize) {
          MemHandle eh = unpack_deref_slot(arr.data() + j);
          wire::encode_len_field(desc.number, ctx.fetch(eh), out);
        }
      } else {
        std::size_t width = scalar_width(desc.type);
        std::vector<ScalarValue> elems;
        for (std::size_t j = 0; j + width <= arr.size(); j += width) {
          elems.push_back(read_scalar_slot(desc.type, arr.data() + j));
        }
        wire::encode_packed_field(desc.number, desc.type, elems, out);
      }
    } else if (desc.type == ScalarType::kMessage) {
      wire::Bytes child;
      encode_record_from_memory(ctx, desc.message_class_id, h, depth + 1, child);
      wire::encode_len_field(desc.number, child, out);
    } else {
      wire::encode_len_field(desc.number, ctx.fetch(h), out);
    }
  }
}

void build_from_buffer(DeviceCtx& ctx, BufReader& r, wire::Bytes& out) {
  while (!r.done()) {
    std::uint8_t kind = r.u8();
    switch (kind) {
      case kRawScalar: {
        std::uint32_t number = r.u32();
        auto type = static_cast<ScalarType>(r.u8());
        wire::ByteView raw = r.bytes(scalar_width(type));
        wire::encode_scalar_field(number, type, read_scalar_slot(type, raw.data()), out);
        break;
      }
      case kRawBytes: {
        std::uint32_t number = r.u32();
        std::uint32_t len = r.u32();
        wire::encode_len_field(number, r.bytes(len), out);
        break;
      }
      case kRawPacked: {
        std::uint32_t number = r.u32();
        auto type = static_cast<ScalarType>(r.u8());
        std::uint32_t count = r.u32();
        std::size_t width = scalar_width(type);
        wire::ByteView raw = r.bytes(count * width);
        std::vector<ScalarValue> elems;
        elems.reserve(count);
        for (std::uint32_t j = 0; j < count; ++j) {
          elems.push_back(read_scalar_slot(type, raw.data() + j * width));
        }
        wire::encode_packed_field(number, type, elems, out);
        break;
      }
      case kMsgBegin: {
        std::uint32_t number = r.u32();
        wire::Bytes child;
        build_from_buffer(ctx, r, child);
        wire::encode_len_field(number, child, out);
        break;
      }
      case kMsgEnd:
        return;
      case kAccPtr: {
        std::uint32_t number = r.u32();
        std::uint8_t ptr_kind = r.u8();
        auto elem_type = static_cast<ScalarType>(r.u8());
        auto region = static_cast<Region>(r.u8());
        std::uint32_t class_id = r.u32();
        std::uint32_t len = r.u32();
        std::uint64_t addr = r.u64();
        MemHandle h{region, addr, len};
        if (ptr_kind == kBytesPtr) {
          wire::encode_len_field(number, ctx.fetch(h), out);
        } else if (ptr_kind == kPackedPtr) {
          wire::Bytes arr = ctx.fetch(h);
          std::size_t width = scalar_width(elem_type);
          std::vector<ScalarValue> elems;
          for (std::size_t j = 0; j + width <= arr.size(); j += width) {
            elems.push_back(read_scalar_slot(elem_type, arr.data() + j));
          }
          wire::encode_packed_field(number, elem_type, elems, out);
        } else if (ptr_kind == kMessagePtr) {
          wire::Bytes child;
          encode_record_from_memory(ctx, static_cast<std::uint16_t>(class_id), h, 0, child);
          wire::encode_len_field(number, child, out);
        } else {
          throw Error(ErrorCode::kBadAccPtr, "unknown pointer kind");
        }
        break;
      }
      default:
        throw Error(ErrorCode::kMalformedWire, "unknown pre-serialized record kind");
    }
  }
}

}  // namespace

AccelSerializeResult Serializer::accel_serialize(const PreSerializedBuffer& buffer,
                                                 std::uint16_t /*class_id*/) {
  AccelSerializeResult result;
  DeviceCtx ctx{&sim_};

  // One DMA read pulls the whole pre-serialized image.
  double read_ns = 0.0;
  auto image = sim_.link().dma_read(buffer.location.addr, buffer.location.len, read_ns);
  ctx.link_ns += read_ns;

  BufReader r{image};
  r.u16();  // root class id (schema lookup happens per spliced record)
  build_from_buffer(ctx, r, result.wire);

  result.device_ns = sim_.config().accel.codec_ns(image.size() + ctx.accel_bytes_read);
  result.link_ns = ctx.link_ns;
  result.dependent_reads = ctx.dependent_reads;
  return result;
}

// --- strategies ---------------------------------------------------------------

namespace {

// Graph encoder shared by the host-driven strategies: values resolve through
// the provided fetch hook, structure comes from the graph.
struct GraphEncoder {
  Simulation* sim;
  // fetches payload bytes for one dereference value
  std::function<wire::Bytes(const BytesValue&)> fetch_bytes;
  CpuCycleProxy* proxy = nullptr;  // counted when the CPU does the encoding

  void count_op(std::uint64_t encoded_estimate) {
    if (proxy != nullptr) {
      proxy->encode_ops_on_cpu += 1;
      proxy->encode_bytes_on_cpu += encoded_estimate;
      proxy->fields_visited += 1;
    }
  }

  void encode(const MessageValue& msg, wire::Bytes& out) {
    const MessageSchema& schema = sim->table().at(msg.class_id);
    for (std::size_t i = 0; i < schema.fields.size(); ++i) {
      const FieldDescriptor& desc = schema.fields[i];
      const FieldSlot& slot = msg.slots[i];
      if (slot_is_default(desc, slot)) continue;
      if (desc.label == Label::kRepeated) {
        if (desc.type == ScalarType::kMessage) {
          for (const auto& e : std::get<RepMessages>(slot).elems) {
            wire::Bytes child;
            if (e.msg) encode(*e.msg, child);
            count_op(child.size());
            wire::encode_len_field(desc.number, child, out);
          }
        } else if (is_len_delimited_type(desc.type)) {
          for (const auto& e : std::get<RepBytes>(slot).elems) {
            wire::Bytes bytes = fetch_bytes(e);
            count_op(bytes.size());
            wire::encode_len_field(desc.number, bytes, out);
          }
        } else {
          const auto& rep = std::get<RepScalars>(slot);
          count_op(rep.elems.size() * scalar_width(desc.type));
          wire::encode_packed_field(desc.number, desc.type, rep.elems, out);
        }
        continue;
      }
      switch (desc.type) {
        case ScalarType::kString:
        case ScalarType::kBytes: {
          wire::Bytes bytes = fetch_bytes(std::get<BytesValue>(slot));
          count_op(bytes.size());
          wire::encode_len_field(desc.number, bytes, out);
          break;
        }
        case ScalarType::kMessage: {
          wire::Bytes child;
          encode(*std::get<SubMessage>(slot).msg, child);
          count_op(child.size());
          wire::encode_len_field(desc.number, child, out);
          break;
        }
        default:
          count_op(scalar_width(desc.type));
          wire::encode_scalar_field(desc.number, desc.type, std::get<ScalarValue>(slot), out);
          break;
      }
    }
  }
};

// True when encoding this node needs bytes out of host memory: any present
// direct scalar (it lives in the host-side record) or any host-resident
// dereference value. Pure accelerator pointers are placement-engine state
// the device already tracks.
bool node_has_host_content(const Simulation& sim, const MessageValue& msg) {
  const MessageSchema& schema = sim.table().at(msg.class_id);
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldDescriptor& desc = schema.fields[i];
    const FieldSlot& slot = msg.slots[i];
    if (slot_is_default(desc, slot)) continue;
    if (desc.addressing() == Addressing::kDirect) return true;
    if (desc.label == Label::kRepeated) {
      if (const auto* rs = std::get_if<RepScalars>(&slot)) {
        if (!handle_in_acc(rs->array)) return true;
      } else if (const auto* rb = std::get_if<RepBytes>(&slot)) {
        for (const auto& e : rb->elems) {
          if (e.is_inline() || !handle_in_acc(e.handle)) return true;
        }
      } else if (const auto* rm = std::get_if<RepMessages>(&slot)) {
        for (const auto& e : rm->elems) {
          if (e.record.null() || e.record.region == Region::kHost) return true;
        }
      }
    } else if (desc.type == ScalarType::kMessage) {
      const auto& sub = std::get<SubMessage>(slot);
      if (sub.record.null() || sub.record.region == Region::kHost) return true;
    } else {
      const auto& b = std::get<BytesValue>(slot);
      if (b.is_inline() || !handle_in_acc(b.handle)) return true;
    }
  }
  return false;
}

}  // namespace

SerializeResult Serializer::serialize_cpu_only(const MessageValue& root) {
  SerializeResult result;
  SerializeMetrics& m = result.metrics;

  // Step 1: every accelerator-resident value is fetched into host memory
  // first: byte payloads, packed arrays, and whole sub-message records. The
  // host knows all the handles, so the reads are independent.
  auto charge_fetch = [&](const MemHandle& h) {
    if (h.null() || h.region != Region::kAccel || h.len == 0) return;
    if (!sim_.memory().is_allocated(h)) {
      throw Error(ErrorCode::kDanglingHandle, "accelerator handle not allocated");
    }
    m.link_ns += sim_.link().charge_dma_read(0, h.len);
  };
  std::function<void(const MessageValue&)> fetch_node = [&](const MessageValue& msg) {
    const MessageSchema& schema = sim_.table().at(msg.class_id);
    for (std::size_t i = 0; i < schema.fields.size(); ++i) {
      const FieldDescriptor& desc = schema.fields[i];
      const FieldSlot& slot = msg.slots[i];
      if (slot_is_default(desc, slot)) continue;
      if (const auto* b = std::get_if<BytesValue>(&slot)) {
        if (!b->is_inline()) charge_fetch(b->handle);
      } else if (const auto* sub = std::get_if<SubMessage>(&slot)) {
        charge_fetch(sub->record);
        if (sub->msg) fetch_node(*sub->msg);
      } else if (const auto* rs = std::get_if<RepScalars>(&slot)) {
        charge_fetch(rs->array);
      } else if (const auto* rb = std::get_if<RepBytes>(&slot)) {
        for (const auto& e : rb->elems) {
          if (!e.is_inline()) charge_fetch(e.handle);
        }
      } else if (const auto* rm = std::get_if<RepMessages>(&slot)) {
        for (const auto& e : rm->elems) {
          charge_fetch(e.record);
          if (e.msg) fetch_node(*e.msg);
        }
      }
    }
  };
  fetch_node(root);

  GraphEncoder enc{&sim_, nullptr, &m.proxy};
  enc.fetch_bytes = [&](const BytesValue& v) -> wire::Bytes {
    wire::Bytes bytes = bytes_of(v, sim_.memory());
    m.proxy.bytes_copied_by_cpu += bytes.size();
    return bytes;
  };

  enc.encode(root, result.wire);
  m.wire_bytes = result.wire.size();

  // Step 3: hand the fabricated message to the device for transmission.
  std::uint64_t staging = sim_.memory().space(Region::kHost).alloc_large(result.wire.size());
  sim_.memory().write(Region::kHost, staging, result.wire);
  m.link_ns += sim_.link().charge_dma_write(staging, result.wire.size());

  m.host_ns = m.proxy.proxy_ns(sim_.config().host);
  m.device_ns = 0.0;
  m.elapsed_ns = m.host_ns + m.link_ns;
  return result;
}

SerializeResult Serializer::serialize_accel_only(const MessageValue& root) {
  SerializeResult result;
  SerializeMetrics& m = result.metrics;

  // The device walks the object graph itself; every host-resident node costs
  // a dependent read because a child's location is only known once its
  // parent's bytes arrived.
  std::function<void(const MessageValue&, const MemHandle&)> charge_node =
      [&](const MessageValue& msg, const MemHandle& record) {
        bool host_record = record.null() || record.region == Region::kHost;
        if (host_record && node_has_host_content(sim_, msg)) {
          std::uint64_t len = record.null()
                                  ? record_size(sim_.table().at(msg.class_id))
                                  : record.len;
          m.link_ns += sim_.link().charge_dma_read(record.addr, len);
          m.dependent_reads += 1;
        }
        const MessageSchema& schema = sim_.table().at(msg.class_id);
        for (std::size_t i = 0; i < schema.fields.size(); ++i) {
          const FieldDescriptor& desc = schema.fields[i];
          const FieldSlot& slot = msg.slots[i];
          if (slot_is_default(desc, slot)) continue;
          if (desc.addressing() == Addressing::kDirect) continue;  // lives in the record
          if (desc.label == Label::kRepeated) {
            if (const auto* rs = std::get_if<RepScalars>(&slot)) {
              if (!handle_in_acc(rs->array)) {
                m.link_ns += sim_.link().charge_dma_read(
                    rs->array.addr, rs->elems.size() * scalar_width(desc.type));
                m.dependent_reads += 1;
              }
            } else if (const auto* rb = std::get_if<RepBytes>(&slot)) {
              // The slot array holding the element pointers is chased first.
              if (!handle_in_acc(rb->slots)) {
                m.link_ns += sim_.link().charge_dma_read(rb->slots.addr,
                                                         rb->elems.size() * kDerefSlotSize);
                m.dependent_reads += 1;
              }
              for (const auto& e : rb->elems) {
                if (e.is_inline() || !handle_in_acc(e.handle)) {
                  std::uint64_t len = e.is_inline() ? e.inline_bytes.size() : e.handle.len;
                  if (len > 0) {
                    m.link_ns += sim_.link().charge_dma_read(e.handle.addr, len);
                    m.dependent_reads += 1;
                  }
                }
              }
            } else if (const auto* rm = std::get_if<RepMessages>(&slot)) {
              if (!handle_in_acc(rm->slots)) {
                m.link_ns += sim_.link().charge_dma_read(rm->slots.addr,
                                                         rm->elems.size() * kDerefSlotSize);
                m.dependent_reads += 1;
              }
              for (const auto& e : rm->elems) {
                if (e.msg) charge_node(*e.msg, e.record);
              }
            }
          } else if (desc.type == ScalarType::kMessage) {
            const auto& sub = std::get<SubMessage>(slot);
            if (sub.msg) charge_node(*sub.msg, sub.record);
          } else {
            const auto& b = std::get<BytesValue>(slot);
            if (b.is_inline() || !handle_in_acc(b.handle)) {
              std::uint64_t len = b.is_inline() ? b.inline_bytes.size() : b.handle.len;
              if (len > 0) {
                m.link_ns += sim_.link().charge_dma_read(b.handle.addr, len);
                m.dependent_reads += 1;
              }
            }
          }
        }
      };

  charge_node(root, MemHandle{});

  GraphEncoder enc{&sim_, nullptr, nullptr};
  enc.fetch_bytes = [&](const BytesValue& v) { return bytes_of(v, sim_.memory()); };
  enc.encode(root, result.wire);

  m.wire_bytes = result.wire.size();
  m.device_ns = sim_.config().accel.codec_ns(result.wire.size());
  m.host_ns = 0.0;
  m.elapsed_ns = m.device_ns + m.link_ns;
  return result;
}

SerializeResult Serializer::serialize_memory_affinity(const MessageValue& root) {
  SerializeResult result;
  SerializeMetrics& m = result.metrics;

  PreSerializeResult pre = pre_serialize(root);
  AccelSerializeResult dev = accel_serialize(pre.buffer, root.class_id);

  result.wire = std::move(dev.wire);
  m.wire_bytes = result.wire.size();
  m.proxy = pre.proxy;
  m.host_ns = pre.host_ns;
  m.device_ns = dev.device_ns;
  m.link_ns = pre.mmio_ns + dev.link_ns;
  m.dependent_reads = dev.dependent_reads;
  m.elapsed_ns = m.host_ns + m.link_ns + m.device_ns;
  return result;
}

SerializeResult Serializer::serialize(const MessageValue& root, Strategy strategy) {
  TxnLedger before = sim_.link().ledger();
  SerializeResult result;
  switch (strategy) {
    case Strategy::kCpuOnly:
      result = serialize_cpu_only(root);
      break;
    case Strategy::kAccelOnly:
      result = serialize_accel_only(root);
      break;
    case Strategy::kMemoryAffinity:
      result = serialize_memory_affinity(root);
      break;
  }
  result.metrics.ledger_delta = sim_.link().ledger().delta_since(before);
  return result;
}

}  // namespace rpcacc
