#include "rpcacc/deserializer.hpp"

#include "doctest.h"
#include "rpcacc/reference.hpp"
#include "rpcacc/runtime.hpp"
#include "rpcacc/workload.hpp"
#include "test_util.hpp"

using namespace rpcacc;
using rpcacc::test::error_code_of;
using rpcacc::test::small_config;
using rpcacc::test::table_of;

namespace {

struct Rig {
  Simulation sim;
  Deserializer deser;

  explicit Rig(const std::string& proto, SimConfig cfg = small_config())
      : sim(cfg, table_of(proto)), deser(sim) {}
};

wire::Bytes encode_for(Rig& rig, const MessageValue& msg) {
  return ref_encode(msg, rig.sim.table());
}

}  // namespace

TEST_CASE("three host scalars batch into a single data DMA write") {
  const char* proto = "message M { int64 a = 1; int64 b = 2; int64 c = 3; }";
  MessageValue msg(table_of(proto).at(1));
  msg.slots[0] = ScalarValue(std::int64_t{10});
  msg.slots[1] = ScalarValue(std::int64_t{20});
  msg.slots[2] = ScalarValue(std::int64_t{30});

  SUBCASE("one-shot") {
    Rig rig(proto);
    DeserResult r = rig.deser.deserialize(encode_for(rig, msg), 1, DeserMode::kOneShot);
    CHECK(r.metrics.host_value_bytes == 24);
    CHECK(r.metrics.data_dma_ops == 1);
    CHECK(r.metrics.ledger_delta.dma_write.ops == 2);  // data flush + completion record
  }
  SUBCASE("field-by-field") {
    Rig rig(proto);
    DeserResult r = rig.deser.deserialize(encode_for(rig, msg), 1, DeserMode::kFieldByField);
    CHECK(r.metrics.data_dma_ops == 3);
    CHECK(r.metrics.host_field_writes == 3);
    CHECK(r.metrics.ledger_delta.dma_write.ops == 4);
  }
}

TEST_CASE("a lone Acc bytes field never touches host DMA") {
  Rig rig("message M { bytes blob = 1 [Acc]; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = BytesValue::of(wire::Bytes(2048, 0x77));

  DeserResult r = rig.deser.deserialize(encode_for(rig, msg), 1, DeserMode::kOneShot);
  CHECK(r.metrics.data_dma_ops == 0);
  CHECK(r.metrics.host_value_bytes == 0);
  CHECK(r.metrics.accel_value_writes == 1);
  CHECK(r.metrics.accel_value_bytes == 2048);
  // only the completion notification crossed
  CHECK(r.metrics.ledger_delta.dma_write.ops == 1);
  CHECK(r.metrics.ledger_delta.dma_write.bytes == Simulation::kDispatchRecordBytes);

  const auto& handle = std::get<BytesValue>(r.root.slots[0]).handle;
  CHECK(handle.region == Region::kAccel);
  CHECK(rig.sim.memory().read(handle) == wire::Bytes(2048, 0x77));
}

TEST_CASE("empty message costs only the completion notification") {
  Rig rig("message M { int64 a = 1; bytes b = 2; }");
  DeserResult r = rig.deser.deserialize({}, 1, DeserMode::kOneShot);
  CHECK(r.metrics.data_dma_ops == 0);
  CHECK(r.metrics.flushes == 0);
  CHECK(r.metrics.ledger_delta.dma_write.ops == 1);
  CHECK(struct_equal(materialize(r.root, rig.sim.memory(), rig.sim.table()),
                     MessageValue(rig.sim.table().at(1))));
}

TEST_CASE("two values totaling 100 bytes flush as one 100-byte write") {
  Rig rig("message M { bytes a = 1; bytes b = 2; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = BytesValue::of(wire::Bytes(40, 1));
  msg.slots[1] = BytesValue::of(wire::Bytes(60, 2));
  DeserResult r = rig.deser.deserialize(encode_for(rig, msg), 1, DeserMode::kOneShot);
  CHECK(r.metrics.flushes == 1);
  CHECK(r.metrics.host_value_bytes == 100);
  CHECK(r.metrics.ledger_delta.dma_write.bytes == 100 + Simulation::kDispatchRecordBytes);
}

TEST_CASE("appends past the buffer capacity flush twice") {
  Rig rig("message M { bytes a = 1; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = BytesValue::of(wire::Bytes(4097, 9));
  DeserResult r = rig.deser.deserialize(encode_for(rig, msg), 1, DeserMode::kOneShot);
  CHECK(r.metrics.flushes == 2);
  CHECK(r.metrics.host_value_bytes == 4097);
}

TEST_CASE("completion record carries the class id and root address") {
  Rig rig("message M { int64 a = 1; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = ScalarValue(std::int64_t{4});
  DeserResult r = rig.deser.deserialize(encode_for(rig, msg), 1, DeserMode::kOneShot);

  // The dispatch ring occupies the first host chunk handed to the simulation.
  std::uint64_t slot0 = rig.sim.memory().chunk_size();
  auto record = rig.sim.memory().read(Region::kHost, slot0, Simulation::kDispatchRecordBytes);
  std::uint16_t cls = static_cast<std::uint16_t>(record[0] | (record[1] << 8));
  CHECK(cls == 1);
  std::uint64_t addr = 0;
  for (int i = 0; i < 8; ++i) addr |= static_cast<std::uint64_t>(record[2 + i]) << (8 * i);
  CHECK(addr == r.root_record.addr);
}

TEST_CASE("each message dispatches exactly one notification in completion order") {
  Rig rig("message M { int64 a = 1; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = ScalarValue(std::int64_t{1});
  wire::Bytes bytes = encode_for(rig, msg);
  DeserResult r1 = rig.deser.deserialize(bytes, 1, DeserMode::kOneShot, 0);
  DeserResult r2 = rig.deser.deserialize(bytes, 1, DeserMode::kOneShot, 1);
  CHECK(r1.metrics.ledger_delta.dma_write.ops == 2);
  CHECK(r2.metrics.ledger_delta.dma_write.ops == 2);

  std::uint64_t base = rig.sim.memory().chunk_size();
  auto rec0 = rig.sim.memory().read(Region::kHost, base, 64);
  auto rec1 = rig.sim.memory().read(Region::kHost, base + 64, 64);
  std::uint64_t seq0 = 0, seq1 = 0;
  for (int i = 0; i < 8; ++i) {
    seq0 |= static_cast<std::uint64_t>(rec0[10 + i]) << (8 * i);
    seq1 |= static_cast<std::uint64_t>(rec1[10 + i]) << (8 * i);
  }
  CHECK(seq0 + 1 == seq1);
}

TEST_CASE("unknown class id is rejected before any memory effect") {
  Rig rig("message M { int64 a = 1; }");
  CHECK(error_code_of([&] {
          rig.deser.deserialize(wire::Bytes{0x08, 0x01}, 99, DeserMode::kOneShot);
        }) == ErrorCode::kUnknownClassId);
}

TEST_CASE("malformed wire propagates a typed codec error") {
  Rig rig("message M { bytes b = 1; }");
  CHECK(error_code_of([&] {
          rig.deser.deserialize(wire::Bytes{0x0A, 0x20, 0x01}, 1, DeserMode::kOneShot);
        }) == ErrorCode::kTruncated);
}

TEST_CASE("host placement follows a cleared bit inside an Acc submessage") {
  Rig rig(R"(
    message Inner { string note = 1; int32 n = 2; }
    message Outer { Inner child = 1 [Acc]; int64 id = 2; }
  )");
  std::uint16_t inner_id = rig.sim.table().find_by_name("Inner")->class_id;
  std::uint16_t outer_id = rig.sim.table().find_by_name("Outer")->class_id;

  MessageValue msg(rig.sim.table().at(outer_id));
  SubMessage child;
  auto inner = std::make_unique<MessageValue>(rig.sim.table().at(inner_id));
  inner->slots[0] = BytesValue::of_string("hello from the host side");
  inner->slots[1] = ScalarValue(std::int32_t{5});
  child.msg = std::move(inner);
  msg.slots[0] = std::move(child);
  msg.slots[1] = ScalarValue(std::int64_t{12});

  DeserResult r = rig.deser.deserialize(encode_for(rig, msg), outer_id, DeserMode::kOneShot);
  const auto& sub = std::get<SubMessage>(r.root.slots[0]);
  CHECK(sub.record.region == Region::kAccel);  // record follows the Acc bit
  const auto& note = std::get<BytesValue>(sub.msg->slots[0]);
  CHECK(note.handle.region == Region::kHost);  // unlabeled leaf stays host
  // host values: outer id (8) + note payload; inner scalar n lives in the
  // accel record, written device-side
  CHECK(r.metrics.host_value_bytes == 8 + 24);
  CHECK(r.metrics.accel_value_writes == 1);
}

namespace {

void check_placement(const Simulation& sim, const MessageValue& msg) {
  const MessageSchema& schema = sim.table().at(msg.class_id);
  for (std::size_t i = 0; i < schema.fields.size(); ++i) {
    const FieldDescriptor& desc = schema.fields[i];
    const FieldSlot& slot = msg.slots[i];
    Region want = desc.acc ? Region::kAccel : Region::kHost;
    if (const auto* b = std::get_if<BytesValue>(&slot)) {
      if (!b->handle.null()) CHECK(b->handle.region == want);
    } else if (const auto* sub = std::get_if<SubMessage>(&slot)) {
      if (!sub->record.null()) CHECK(sub->record.region == want);
      if (sub->msg) check_placement(sim, *sub->msg);
    } else if (const auto* rs = std::get_if<RepScalars>(&slot)) {
      if (!rs->array.null()) CHECK(rs->array.region == want);
    } else if (const auto* rb = std::get_if<RepBytes>(&slot)) {
      for (const auto& e : rb->elems) {
        if (!e.handle.null()) CHECK(e.handle.region == want);
      }
    } else if (const auto* rm = std::get_if<RepMessages>(&slot)) {
      for (const auto& e : rm->elems) {
        if (!e.record.null()) CHECK(e.record.region == want);
        if (e.msg) check_placement(sim, *e.msg);
      }
    }
  }
}

}  // namespace

TEST_CASE("random messages: readback equals the software decode, placement is sound") {
  WorkloadSpec spec;
  spec.seed = 99;
  spec.request_count = 60;
  spec.class_count = 5;
  spec.depth_min = 1;
  spec.depth_max = 6;
  spec.fields_min = 3;
  spec.fields_max = 9;
  spec.field_size_min = 1;
  spec.field_size_max = 600;
  spec.acc_fraction = 0.4;
  spec.repeated_probability = 0.2;
  Workload wl = generate_workload(spec);

  Simulation sim(small_config(), wl.table);
  Deserializer deser(sim);

  std::uint64_t chunk = sim.memory().chunk_size();
  for (const auto& msg : wl.messages) {
    wire::Bytes bytes = ref_encode(msg, wl.table);
    DeserResult r = deser.deserialize(bytes, msg.class_id, DeserMode::kOneShot);

    MessageValue from_memory =
        readback_object(sim.memory(), sim.table(), msg.class_id, r.root_record);
    MessageValue oracle = ref_decode(bytes, msg.class_id, wl.table);
    REQUIRE(struct_equal(materialize(from_memory, sim.memory(), sim.table()), oracle));

    check_placement(sim, r.root);

    // one-shot transaction bound, completion record included
    std::uint64_t limit = (r.metrics.host_value_bytes + chunk - 1) / chunk + 1;
    CHECK(r.metrics.data_dma_ops + 1 <= limit);
  }
}

TEST_CASE("one-shot never takes longer than field-by-field") {
  WorkloadSpec spec;
  spec.seed = 123;
  spec.request_count = 40;
  spec.class_count = 4;
  spec.depth_min = 1;
  spec.depth_max = 4;
  spec.fields_min = 2;
  spec.fields_max = 10;
  spec.field_size_min = 1;
  spec.field_size_max = 2000;
  spec.repeated_probability = 0.15;
  Workload wl = generate_workload(spec);

  Simulation sim_a(small_config(), wl.table);
  Deserializer one_shot(sim_a);
  Simulation sim_b(small_config(), wl.table);
  Deserializer fieldwise(sim_b);

  for (const auto& msg : wl.messages) {
    wire::Bytes bytes = ref_encode(msg, wl.table);
    DeserResult a = one_shot.deserialize(bytes, msg.class_id, DeserMode::kOneShot);
    DeserResult b = fieldwise.deserialize(bytes, msg.class_id, DeserMode::kFieldByField);
    CHECK(a.metrics.elapsed_ns <= b.metrics.elapsed_ns);
    CHECK(b.metrics.ledger_delta.dma_write.ops == b.metrics.host_field_writes + 1);
  }
}

TEST_CASE("repeated sub-messages place element records and a slot array") {
  Rig rig(R"(
    message Item { int32 n = 1; string tag = 2; }
    message Cart { repeated Item items = 1 [Acc]; int64 owner = 2; }
  )");
  std::uint16_t item_id = rig.sim.table().find_by_name("Item")->class_id;
  std::uint16_t cart_id = rig.sim.table().find_by_name("Cart")->class_id;

  MessageValue msg(rig.sim.table().at(cart_id));
  RepMessages items;
  for (int k = 0; k < 3; ++k) {
    SubMessage e;
    auto item = std::make_unique<MessageValue>(rig.sim.table().at(item_id));
    item->slots[0] = ScalarValue(std::int32_t{k + 1});
    item->slots[1] = BytesValue::of_string("tag-" + std::to_string(k));
    e.msg = std::move(item);
    items.elems.push_back(std::move(e));
  }
  msg.slots[0] = std::move(items);
  msg.slots[1] = ScalarValue(std::int64_t{5});

  wire::Bytes bytes = encode_for(rig, msg);
  DeserResult r = rig.deser.deserialize(bytes, cart_id, DeserMode::kOneShot);
  const auto& rep = std::get<RepMessages>(r.root.slots[0]);
  REQUIRE(rep.elems.size() == 3);
  CHECK(rep.slots.region == Region::kAccel);
  CHECK(rep.slots.len == 3 * kDerefSlotSize);
  for (const auto& e : rep.elems) CHECK(e.record.region == Region::kAccel);
  // element tags are host fields inside accelerator records
  CHECK(std::get<BytesValue>(rep.elems[0].msg->slots[1]).handle.region == Region::kHost);

  MessageValue back = readback_object(rig.sim.memory(), rig.sim.table(), cart_id, r.root_record);
  CHECK(struct_equal(materialize(back, rig.sim.memory(), rig.sim.table()),
                     ref_decode(bytes, cart_id, rig.sim.table())));
}

TEST_CASE("a message class with no fields still yields a valid object") {
  Rig rig("message Empty {} message M { Empty e = 1; int32 n = 2; }");
  std::uint16_t m_id = rig.sim.table().find_by_name("M")->class_id;

  MessageValue msg(rig.sim.table().at(m_id));
  SubMessage e;
  e.msg = std::make_unique<MessageValue>(rig.sim.table().at(1));
  msg.slots[0] = std::move(e);
  msg.slots[1] = ScalarValue(std::int32_t{4});

  wire::Bytes bytes = encode_for(rig, msg);
  DeserResult r = rig.deser.deserialize(bytes, m_id, DeserMode::kOneShot);
  const auto& sub = std::get<SubMessage>(r.root.slots[0]);
  CHECK_FALSE(sub.record.null());  // present, distinguishable from absent
  CHECK(sub.record.len == 0);
  MessageValue back = readback_object(rig.sim.memory(), rig.sim.table(), m_id, r.root_record);
  CHECK(struct_equal(materialize(back, rig.sim.memory(), rig.sim.table()),
                     ref_decode(bytes, m_id, rig.sim.table())));
}

TEST_CASE("snapshot bits steer placement per message") {
  Rig rig("message M { bytes b = 1; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = BytesValue::of(wire::Bytes(128, 3));
  wire::Bytes bytes = encode_for(rig, msg);

  DeserResult before = rig.deser.deserialize(bytes, 1, DeserMode::kOneShot);
  CHECK(std::get<BytesValue>(before.root.slots[0]).handle.region == Region::kHost);

  rig.sim.table().set_placement_bit(1, 1, true);
  DeserResult after = rig.deser.deserialize(bytes, 1, DeserMode::kOneShot);
  CHECK(std::get<BytesValue>(after.root.slots[0]).handle.region == Region::kAccel);
}
