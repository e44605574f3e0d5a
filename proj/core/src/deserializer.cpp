#include "rpcacc/deserializer.hpp"

#include <cstring>

namespace rpcacc {

namespace {
constexpr int kMaxDepth = 64;  // schema stack limit, past the "dozen levels" seen in practice
}

Deserializer::Deserializer(Simulation& sim) : sim_(sim) {
  std::uint32_t n = sim_.config().deser.lanes;
  lanes_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    lanes_[i].id = i;
    lanes_[i].temp.capacity = sim_.config().deser.temp_buffer_bytes;
    // used == chunk_size forces the first allocation to pop a chunk
    lanes_[i].chunk_used[0] = sim_.memory().chunk_size();
    lanes_[i].chunk_used[1] = sim_.memory().chunk_size();
  }
}

void Deserializer::link_op(MsgContext& ctx, double cost) {
  ctx.metrics.link_ns += cost;
  ctx.metrics.link_op_costs.push_back(cost);
}

double Deserializer::flush(MsgContext& ctx) {
  TempBuffer& temp = ctx.lane->temp;
  if (temp.empty()) return 0.0;  // no-op, zero transactions
  // The staged bytes land in one contiguous transfer; the host runtime knows
  // the append-order mapping, so scattering to final slots is host-local.
  for (const auto& p : temp.pending) {
    sim_.memory().write(Region::kHost, p.dest_addr,
                        std::span<const std::uint8_t>(temp.data.data() + p.offset, p.len));
  }
  double cost = sim_.link().charge_dma_write(temp.pending.front().dest_addr, temp.used());
  temp.data.clear();
  temp.pending.clear();
  ctx.metrics.flushes += 1;
  ctx.metrics.data_dma_ops += 1;
  link_op(ctx, cost);
  return cost;
}

std::uint64_t Deserializer::bump_alloc(MsgContext& ctx, Region region, std::uint64_t len) {
  RegionStats& stats = region == Region::kHost ? host_stats_ : accel_stats_;
  MemorySpace& space = sim_.memory().space(region);
  std::uint64_t chunk_size = space.chunk_size();
  int r = static_cast<int>(region);
  Lane& lane = *ctx.lane;

  if (len > chunk_size) {
    stats.large_objects += 1;
    stats.large_bytes += len;
    return space.alloc_large(len);
  }
  if (lane.chunk_used[r] + len > chunk_size || lane.chunk[r] == 0) {
    // Refilling a chunk never interrupts staging: flushes land in a
    // contiguous window whose mapping rides the completion record, so only
    // the capacity and message-end triggers issue DMA writes.
    lane.chunk[r] = space.alloc_chunk();
    lane.chunk_used[r] = 0;
    stats.chunks_popped += 1;
  }
  std::uint64_t addr = lane.chunk[r] + lane.chunk_used[r];
  lane.chunk_used[r] += len;
  stats.chunk_bytes_placed += len;
  return addr;
}

void Deserializer::host_value_write(MsgContext& ctx, std::uint64_t dest, wire::ByteView bytes) {
  ctx.metrics.host_value_bytes += bytes.size();
  ctx.metrics.host_field_writes += 1;
  if (ctx.mode == DeserMode::kFieldByField) {
    sim_.memory().write(Region::kHost, dest, bytes);
    double cost = sim_.link().charge_dma_write(dest, bytes.size());
    ctx.metrics.data_dma_ops += 1;
    link_op(ctx, cost);
    return;
  }
  // Append-only staging; a value may split across flushes when it crosses
  // the capacity boundary.
  TempBuffer& temp = ctx.lane->temp;
  std::size_t off = 0;
  while (off < bytes.size()) {
    std::size_t space_left = temp.capacity - temp.used();
    if (space_left == 0) {
      flush(ctx);
      space_left = temp.capacity;
    }
    std::size_t take = std::min(space_left, bytes.size() - off);
    temp.pending.push_back({dest + off, temp.data.size(), static_cast<std::uint32_t>(take)});
    temp.data.insert(temp.data.end(), bytes.begin() + off, bytes.begin() + off + take);
    off += take;
    if (temp.used() == temp.capacity) flush(ctx);
  }
}

void Deserializer::accel_value_write(MsgContext& ctx, std::uint64_t dest, wire::ByteView bytes) {
  // Device-local write, no interconnect involvement.
  sim_.memory().write(Region::kAccel, dest, bytes);
  ctx.metrics.accel_value_writes += 1;
  ctx.metrics.accel_value_bytes += bytes.size();
}

void Deserializer::value_write(MsgContext& ctx, Region region, std::uint64_t dest,
                               wire::ByteView bytes) {
  if (region == Region::kHost) {
    host_value_write(ctx, dest, bytes);
  } else {
    accel_value_write(ctx, dest, bytes);
  }
}

MessageValue Deserializer::parse_message(MsgContext& ctx, wire::ByteView buf,
                                         const MessageSchema& schema, Region record_region,
                                         std::uint64_t record_addr, int depth) {
  if (depth > kMaxDepth) {
    throw Error(ErrorCode::kDepthExceeded, "message nesting exceeds the schema stack");
  }
  ctx.lane->schema_stack.push_back(schema.class_id);
  MessageValue graph(schema);

  std::uint8_t scalar_buf[8];
  std::size_t pos = 0;
  while (pos < buf.size()) {
    wire::DecodedField f = wire::decode_field(buf.subspan(pos), schema);
    pos += f.consumed;
    if (f.desc == nullptr) continue;  // unknown field: skip, never forward
    const FieldDescriptor& desc = *f.desc;
    std::size_t idx = schema.field_index(f.field_number);
    std::uint64_t slot_addr = record_addr + slot_offset(schema, idx);
    Region field_region = desc.acc ? Region::kAccel : Region::kHost;

    if (desc.label == Label::kRepeated) {
      if (desc.type == ScalarType::kMessage) {
        const MessageSchema& child_schema = sim_.table().at(desc.message_class_id);
        std::uint64_t child_addr =
            bump_alloc(ctx, field_region, record_size(child_schema));
        MessageValue child =
            parse_message(ctx, f.payload, child_schema, field_region, child_addr, depth + 1);
        SubMessage e;
        e.msg = std::make_unique<MessageValue>(std::move(child));
        e.record = {field_region, child_addr,
                    static_cast<std::uint32_t>(record_size(child_schema))};
        std::get<RepMessages>(graph.slots[idx]).elems.push_back(std::move(e));
      } else if (is_len_delimited_type(desc.type)) {
        MemHandle h{field_region, 0, static_cast<std::uint32_t>(f.payload.size())};
        if (!f.payload.empty()) {
          h.addr = bump_alloc(ctx, field_region, f.payload.size());
          value_write(ctx, field_region, h.addr, f.payload);
        } else {
          h.addr = bump_alloc(ctx, field_region, 0);
        }
        std::get<RepBytes>(graph.slots[idx]).elems.push_back(BytesValue::of(h));
      } else {
        auto elems = wire::decode_packed_payload(desc.type, f.payload);
        auto& dst = std::get<RepScalars>(graph.slots[idx]).elems;
        dst.insert(dst.end(), elems.begin(), elems.end());
      }
      continue;
    }

    switch (desc.type) {
      case ScalarType::kMessage: {
        const MessageSchema& child_schema = sim_.table().at(desc.message_class_id);
        std::uint64_t child_addr = bump_alloc(ctx, field_region, record_size(child_schema));
        MessageValue child =
            parse_message(ctx, f.payload, child_schema, field_region, child_addr, depth + 1);
        MemHandle h{field_region, child_addr,
                    static_cast<std::uint32_t>(record_size(child_schema))};
        ctx.fixups.push_back({record_region, slot_addr, h});
        SubMessage sub;
        sub.msg = std::make_unique<MessageValue>(std::move(child));
        sub.record = h;
        graph.slots[idx] = std::move(sub);
        break;
      }
      case ScalarType::kString:
      case ScalarType::kBytes: {
        MemHandle h{field_region, 0, static_cast<std::uint32_t>(f.payload.size())};
        if (!f.payload.empty()) {
          h.addr = bump_alloc(ctx, field_region, f.payload.size());
          value_write(ctx, field_region, h.addr, f.payload);
          ctx.fixups.push_back({record_region, slot_addr, h});
        }
        graph.slots[idx] = BytesValue::of(h);
        break;
      }
      default: {
        // Direct scalar: value lands inline in the parent record.
        write_scalar_slot(desc.type, f.scalar, scalar_buf);
        value_write(ctx, record_region, slot_addr,
                    wire::ByteView(scalar_buf, scalar_width(desc.type)));
        graph.slots[idx] = f.scalar;
        break;
      }
    }
  }

  // Repeated fields materialize their arrays once the element count is
  // known: packed scalars as one native-width array write, dereference
  // elements as an array of pointer slots fixed up at dispatch.
  for (std::size_t idx = 0; idx < schema.fields.size(); ++idx) {
    const FieldDescriptor& desc = schema.fields[idx];
    if (desc.label != Label::kRepeated) continue;
    Region field_region = desc.acc ? Region::kAccel : Region::kHost;
    std::uint64_t slot_addr = record_addr + slot_offset(schema, idx);

    if (desc.type == ScalarType::kMessage) {
      auto& rep = std::get<RepMessages>(graph.slots[idx]);
      if (rep.elems.empty()) continue;
      std::uint64_t array_addr = bump_alloc(ctx, field_region, rep.elems.size() * kDerefSlotSize);
      for (std::size_t j = 0; j < rep.elems.size(); ++j) {
        ctx.fixups.push_back({field_region, array_addr + j * kDerefSlotSize, rep.elems[j].record});
      }
      rep.slots = {field_region, array_addr,
                   static_cast<std::uint32_t>(rep.elems.size() * kDerefSlotSize)};
      ctx.fixups.push_back({record_region, slot_addr, rep.slots});
    } else if (is_len_delimited_type(desc.type)) {
      auto& rep = std::get<RepBytes>(graph.slots[idx]);
      if (rep.elems.empty()) continue;
      std::uint64_t array_addr = bump_alloc(ctx, field_region, rep.elems.size() * kDerefSlotSize);
      for (std::size_t j = 0; j < rep.elems.size(); ++j) {
        ctx.fixups.push_back({field_region, array_addr + j * kDerefSlotSize, rep.elems[j].handle});
      }
      rep.slots = {field_region, array_addr,
                   static_cast<std::uint32_t>(rep.elems.size() * kDerefSlotSize)};
      ctx.fixups.push_back({record_region, slot_addr, rep.slots});
    } else {
      auto& rep = std::get<RepScalars>(graph.slots[idx]);
      if (rep.elems.empty()) continue;
      std::size_t width = scalar_width(desc.type);
      wire::Bytes array(rep.elems.size() * width);
      for (std::size_t j = 0; j < rep.elems.size(); ++j) {
        write_scalar_slot(desc.type, rep.elems[j], array.data() + j * width);
      }
      std::uint64_t array_addr = bump_alloc(ctx, field_region, array.size());
      value_write(ctx, field_region, array_addr, array);
      rep.array = {field_region, array_addr, static_cast<std::uint32_t>(array.size())};
      ctx.fixups.push_back({record_region, slot_addr, rep.array});
    }
  }

  ctx.lane->schema_stack.pop_back();
  return graph;
}

DeserResult Deserializer::deserialize(wire::ByteView wire, std::uint16_t class_id, DeserMode mode,
                                      std::uint32_t lane_id) {
  if (!sim_.table().contains(class_id)) {
    throw Error(ErrorCode::kUnknownClassId, "class id " + std::to_string(class_id));
  }
  const MessageSchema& schema = sim_.table().at(class_id);

  MsgContext ctx;
  ctx.mode = mode;
  ctx.lane = &lanes_.at(lane_id);
  ctx.metrics.wire_bytes = wire.size();

  TxnLedger ledger_before = sim_.link().ledger();

  std::uint64_t root_addr = bump_alloc(ctx, Region::kHost, record_size(schema));
  MessageValue root = parse_message(ctx, wire, schema, Region::kHost, root_addr, 0);

  if (mode == DeserMode::kOneShot) {
    flush(ctx);  // message end
  }

  // Dispatch: pointer slots materialize host-side from the completion
  // record's mapping, then one fixed-size DMA write notifies the host.
  std::uint8_t slot_buf[kDerefSlotSize];
  for (const auto& fx : ctx.fixups) {
    pack_deref_slot(fx.handle, slot_buf);
    sim_.memory().write(fx.record_region, fx.slot_addr, slot_buf);
  }

  std::uint8_t record[Simulation::kDispatchRecordBytes] = {0};
  record[0] = static_cast<std::uint8_t>(class_id);
  record[1] = static_cast<std::uint8_t>(class_id >> 8);
  for (int i = 0; i < 8; ++i) record[2 + i] = static_cast<std::uint8_t>(root_addr >> (8 * i));
  std::uint64_t seq = dispatch_seq_++;
  for (int i = 0; i < 8; ++i) record[10 + i] = static_cast<std::uint8_t>(seq >> (8 * i));
  double dispatch_cost =
      sim_.link().dma_write(sim_.next_dispatch_slot(), record);
  link_op(ctx, dispatch_cost);

  ctx.metrics.compute_ns = sim_.config().accel.codec_ns(wire.size());
  ctx.metrics.elapsed_ns = ctx.metrics.compute_ns + ctx.metrics.link_ns;
  ctx.metrics.ledger_delta = sim_.link().ledger().delta_since(ledger_before);

  DeserResult result;
  result.root = std::move(root);
  result.root_record = {Region::kHost, root_addr, static_cast<std::uint32_t>(record_size(schema))};
  result.metrics = std::move(ctx.metrics);
  return result;
}

}  // namespace rpcacc
