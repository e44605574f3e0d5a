#include "rpcacc/runtime.hpp"

#include "rpcacc/reference.hpp"

namespace rpcacc {

std::uint64_t HostRuntime::runtime_alloc(Region region, std::uint64_t len) {
  MemorySpace& space = sim_.memory().space(region);
  std::uint64_t chunk_size = space.chunk_size();
  int r = static_cast<int>(region);
  if (len > chunk_size) {
    return space.alloc_large(len);
  }
  if (chunk_[r] == 0 || chunk_used_[r] + len > chunk_size) {
    chunk_[r] = space.alloc_chunk();
    chunk_used_[r] = 0;
  }
  std::uint64_t addr = chunk_[r] + chunk_used_[r];
  chunk_used_[r] += len;
  return addr;
}

MoveResult HostRuntime::move_handle(MemHandle& h, Region target, std::uint16_t class_id,
                                    std::uint32_t field_number) {
  MoveResult result;
  if (h.region == target || h.null()) {
    result.handle = h;  // idempotent: already resident, no traffic, bit unchanged
    return result;
  }
  if (!sim_.memory().is_allocated(h)) {
    throw Error(ErrorCode::kDanglingHandle, "move of unallocated handle");
  }

  double elapsed = sim_.link().mmio_write(0xB0, h.addr);  // move command doorbell
  std::uint64_t dest = runtime_alloc(target, h.len);
  if (target == Region::kAccel) {
    // Device pulls the bytes out of host memory and lands them locally.
    double read_ns = 0.0;
    auto bytes = sim_.link().dma_read(h.addr, h.len, read_ns);
    elapsed += read_ns;
    sim_.memory().write(Region::kAccel, dest, bytes);
  } else {
    // Device pushes its local bytes into host memory.
    auto bytes = sim_.memory().read(Region::kAccel, h.addr, h.len);
    elapsed += sim_.link().dma_write(dest, bytes);
  }
  h = {target, dest, h.len};

  // The schema update rides the same MMIO command, no extra transaction.
  if (sim_.config().auto_field_update && class_id != 0) {
    sim_.table().set_placement_bit(class_id, field_number, target == Region::kAccel);
  }

  ++explicit_moves_;
  result.handle = h;
  result.elapsed_ns = elapsed;
  result.moved = true;
  return result;
}

MoveResult HostRuntime::move_to_acc(BytesValue& slot, std::uint16_t class_id,
                                    std::uint32_t field_number) {
  if (slot.is_inline()) {
    throw Error(ErrorCode::kDanglingHandle, "moveToAcc on a value without a memory handle");
  }
  return move_handle(slot.handle, Region::kAccel, class_id, field_number);
}

MoveResult HostRuntime::move_to_cpu(BytesValue& slot, std::uint16_t class_id,
                                    std::uint32_t field_number) {
  if (slot.is_inline()) {
    throw Error(ErrorCode::kDanglingHandle, "moveToCPU on a value without a memory handle");
  }
  return move_handle(slot.handle, Region::kHost, class_id, field_number);
}

MoveResult HostRuntime::move_to_acc(FieldHandle& handle) {
  return move_handle(handle.mem, Region::kAccel, handle.class_id, handle.field_number);
}

MoveResult HostRuntime::move_to_cpu(FieldHandle& handle) {
  return move_handle(handle.mem, Region::kHost, handle.class_id, handle.field_number);
}

namespace {

MessageValue readback_record(const MemoryModel& mem, const SchemaTable& table,
                             std::uint16_t class_id, const MemHandle& record, int depth) {
  if (depth > kMaxDecodeDepth) {
    throw Error(ErrorCode::kDepthExceeded, "record graph deeper than the decode limit");
  }
  const MessageSchema& schema = table.at(class_id);
  MessageValue msg(schema);
  if (record.null()) return msg;

  std::vector<std::uint8_t> rec = mem.read(record.region, record.addr, record_size(schema));
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldDescriptor& desc = schema.fields[i];
    const std::uint8_t* slot = rec.data() + slot_offset(schema, i);
    if (desc.addressing() == Addressing::kDirect) {
      msg.slots[i] = read_scalar_slot(desc.type, slot);
      continue;
    }
    MemHandle h = unpack_deref_slot(slot);
    if (desc.label == Label::kRepeated) {
      if (h.null()) continue;  // empty repeated field
      if (desc.type == ScalarType::kMessage) {
        auto slots = mem.read(h);
        RepMessages rep;
        rep.slots = h;
        for (std::size_t j = 0; j + kDerefSlotSize <= slots.size(); j += kDerefSlotSize) {
          MemHandle eh = unpack_deref_slot(slots.data() + j);
          SubMessage e;
          e.record = eh;
          e.msg = std::make_unique<MessageValue>(
              readback_record(mem, table, desc.message_class_id, eh, depth + 1));
          rep.elems.push_back(std::move(e));
        }
        msg.slots[i] = std::move(rep);
      } else if (is_len_delimited_type(desc.type)) {
        auto slots = mem.read(h);
        RepBytes rep;
        rep.slots = h;
        for (std::size_t j = 0; j + kDerefSlotSize <= slots.size(); j += kDerefSlotSize) {
          rep.elems.push_back(BytesValue::of(unpack_deref_slot(slots.data() + j)));
        }
        msg.slots[i] = std::move(rep);
      } else {
        auto array = mem.read(h);
        RepScalars rep;
        rep.array = h;
        std::size_t width = scalar_width(desc.type);
        for (std::size_t j = 0; j + width <= array.size(); j += width) {
          rep.elems.push_back(read_scalar_slot(desc.type, array.data() + j));
        }
        msg.slots[i] = std::move(rep);
      }
    } else if (desc.type == ScalarType::kMessage) {
      if (h.null()) continue;  // absent sub-message
      SubMessage sub;
      sub.record = h;
      sub.msg = std::make_unique<MessageValue>(
          readback_record(mem, table, desc.message_class_id, h, depth + 1));
      msg.slots[i] = std::move(sub);
    } else {
      msg.slots[i] = BytesValue::of(h);
    }
  }
  return msg;
}

}  // namespace

MessageValue readback_object(const MemoryModel& mem, const SchemaTable& table,
                             std::uint16_t class_id, const MemHandle& record) {
  return readback_record(mem, table, class_id, record, 0);
}

}  // namespace rpcacc
