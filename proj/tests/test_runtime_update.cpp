#include "rpcacc/runtime.hpp"

#include "doctest.h"
#include "rpcacc/deserializer.hpp"
#include "rpcacc/reference.hpp"
#include "test_util.hpp"

using namespace rpcacc;
using rpcacc::test::small_config;
using rpcacc::test::table_of;

namespace {

struct Rig {
  Simulation sim;
  Deserializer deser;
  HostRuntime runtime;

  explicit Rig(const std::string& proto, SimConfig cfg = small_config())
      : sim(cfg, table_of(proto)), deser(sim), runtime(sim) {}

  DeserResult place(const MessageValue& msg) {
    return deser.deserialize(ref_encode(msg, sim.table()), msg.class_id, DeserMode::kOneShot);
  }
};

MessageValue bytes_message(const SchemaTable& table, std::size_t len, std::uint8_t fill) {
  MessageValue msg(table.at(1));
  msg.slots[0] = BytesValue::of(wire::Bytes(len, fill));
  return msg;
}

}  // namespace

TEST_CASE("isInAcc reflects the handle region") {
  Rig rig("message M { bytes b = 1 [Acc]; bytes c = 2; }");
  MessageValue msg(rig.sim.table().at(1));
  msg.slots[0] = BytesValue::of(wire::Bytes(64, 1));
  msg.slots[1] = BytesValue::of(wire::Bytes(64, 2));
  DeserResult placed = rig.place(msg);
  CHECK(HostRuntime::is_in_acc(std::get<BytesValue>(placed.root.slots[0])));
  CHECK_FALSE(HostRuntime::is_in_acc(std::get<BytesValue>(placed.root.slots[1])));
}

TEST_CASE("moveToAcc relocates bytes, charges one MMIO and one DMA read") {
  Rig rig("message M { bytes b = 1; }");
  DeserResult placed = rig.place(bytes_message(rig.sim.table(), 2048, 0x5B));
  auto& slot = std::get<BytesValue>(placed.root.slots[0]);

  TxnLedger before = rig.sim.link().ledger();
  MoveResult mv = rig.runtime.move_to_acc(slot, 1, 1);
  TxnLedger delta = rig.sim.link().ledger().delta_since(before);

  CHECK(mv.moved);
  CHECK(slot.handle.region == Region::kAccel);
  CHECK(delta.mmio_write.ops == 1);
  CHECK(delta.dma_read.ops == 1);
  CHECK(delta.dma_read.bytes == 2048);
  CHECK(delta.dma_write.ops == 0);
  CHECK(rig.sim.memory().read(slot.handle) == wire::Bytes(2048, 0x5B));
  // the placement bit followed the move
  CHECK(rig.sim.table().placement_bit(1, 1));
}

TEST_CASE("moveToAcc on accelerator-resident data is a free no-op") {
  Rig rig("message M { bytes b = 1 [Acc]; }");
  DeserResult placed = rig.place(bytes_message(rig.sim.table(), 128, 1));
  auto& slot = std::get<BytesValue>(placed.root.slots[0]);

  TxnLedger before = rig.sim.link().ledger();
  MoveResult mv = rig.runtime.move_to_acc(slot, 1, 1);
  CHECK_FALSE(mv.moved);
  CHECK(mv.elapsed_ns == 0.0);
  CHECK(rig.sim.link().ledger().delta_since(before).total_ops() == 0);
  CHECK(rig.sim.table().placement_bit(1, 1));  // unchanged
  CHECK(rig.runtime.explicit_moves() == 0);
}

TEST_CASE("moveToCPU mirrors the protocol and clears the bit") {
  Rig rig("message M { bytes b = 1 [Acc]; }");
  DeserResult placed = rig.place(bytes_message(rig.sim.table(), 1024, 0xA1));
  auto& slot = std::get<BytesValue>(placed.root.slots[0]);

  TxnLedger before = rig.sim.link().ledger();
  MoveResult mv = rig.runtime.move_to_cpu(slot, 1, 1);
  TxnLedger delta = rig.sim.link().ledger().delta_since(before);

  CHECK(mv.moved);
  CHECK(slot.handle.region == Region::kHost);
  CHECK(delta.mmio_write.ops == 1);
  CHECK(delta.dma_write.ops == 1);
  CHECK(delta.dma_write.bytes == 1024);
  CHECK_FALSE(rig.sim.table().placement_bit(1, 1));
  CHECK(rig.sim.memory().read(slot.handle) == wire::Bytes(1024, 0xA1));
}

TEST_CASE("the next message of the class lands where the move directed") {
  Rig rig("message M { bytes b = 1; }");
  MessageValue msg = bytes_message(rig.sim.table(), 512, 7);

  DeserResult first = rig.place(msg);
  auto& slot = std::get<BytesValue>(first.root.slots[0]);
  CHECK(slot.handle.region == Region::kHost);
  rig.runtime.move_to_acc(slot, 1, 1);

  DeserResult second = rig.place(msg);
  CHECK(std::get<BytesValue>(second.root.slots[0]).handle.region == Region::kAccel);
  CHECK(rig.runtime.explicit_moves() == 1);  // no second move needed
}

TEST_CASE("bit and handle agree immediately after a move") {
  Rig rig("message M { bytes b = 1; }");
  DeserResult placed = rig.place(bytes_message(rig.sim.table(), 96, 2));
  auto& slot = std::get<BytesValue>(placed.root.slots[0]);

  rig.runtime.move_to_acc(slot, 1, 1);
  CHECK(rig.sim.table().placement_bit(1, 1) == (slot.handle.region == Region::kAccel));
  rig.runtime.move_to_cpu(slot, 1, 1);
  CHECK(rig.sim.table().placement_bit(1, 1) == (slot.handle.region == Region::kAccel));
}

TEST_CASE("manual mode moves bytes without touching the schema") {
  SimConfig cfg = small_config();
  cfg.auto_field_update = false;
  Rig rig("message M { bytes b = 1; }", cfg);
  DeserResult placed = rig.place(bytes_message(rig.sim.table(), 256, 3));
  auto& slot = std::get<BytesValue>(placed.root.slots[0]);
  rig.runtime.move_to_acc(slot, 1, 1);
  CHECK(slot.handle.region == Region::kAccel);
  CHECK_FALSE(rig.sim.table().placement_bit(1, 1));  // label untouched
}

TEST_CASE("one-miss convergence: a single flip costs exactly one move") {
  Rig rig("message M { bytes b = 1 [Acc]; }");
  MessageValue msg = bytes_message(rig.sim.table(), 1024, 9);

  // steady stream consuming the field on the accelerator side: no moves
  for (int i = 0; i < 3; ++i) {
    DeserResult r = rig.place(msg);
    auto& slot = std::get<BytesValue>(r.root.slots[0]);
    if (!HostRuntime::is_in_acc(slot)) rig.runtime.move_to_acc(slot, 1, 1);
  }
  CHECK(rig.runtime.explicit_moves() == 0);

  // consumer flips to the host side
  std::uint64_t moves_at_flip = rig.runtime.explicit_moves();
  for (int i = 0; i < 5; ++i) {
    DeserResult r = rig.place(msg);
    auto& slot = std::get<BytesValue>(r.root.slots[0]);
    if (HostRuntime::is_in_acc(slot)) rig.runtime.move_to_cpu(slot, 1, 1);
  }
  CHECK(rig.runtime.explicit_moves() - moves_at_flip == 1);
}

TEST_CASE("moves on dangling or inline values are rejected") {
  Rig rig("message M { bytes b = 1; }");
  BytesValue inline_value = BytesValue::of(wire::Bytes{1, 2, 3});
  CHECK(rpcacc::test::error_code_of([&] { rig.runtime.move_to_acc(inline_value, 1, 1); }) ==
        ErrorCode::kDanglingHandle);
  BytesValue dangling = BytesValue::of(MemHandle{Region::kHost, 0xFFF000, 32});
  CHECK(rpcacc::test::error_code_of([&] { rig.runtime.move_to_acc(dangling, 1, 1); }) ==
        ErrorCode::kDanglingHandle);
}

TEST_CASE("readback walks records straight out of simulated memory") {
  Rig rig(R"(
    message Leaf { bytes payload = 1 [Acc]; int32 tag = 2; }
    message Root { Leaf leaf = 1; repeated int64 xs = 2; string name = 3; }
  )");
  std::uint16_t root_id = rig.sim.table().find_by_name("Root")->class_id;
  std::uint16_t leaf_id = rig.sim.table().find_by_name("Leaf")->class_id;

  MessageValue msg(rig.sim.table().at(root_id));
  SubMessage leaf;
  auto lm = std::make_unique<MessageValue>(rig.sim.table().at(leaf_id));
  lm->slots[0] = BytesValue::of(wire::Bytes(777, 0xCD));
  lm->slots[1] = ScalarValue(std::int32_t{-42});
  leaf.msg = std::move(lm);
  msg.slots[0] = std::move(leaf);
  RepScalars xs;
  for (std::int64_t v : {1, -2, 3}) xs.elems.push_back(ScalarValue(v));
  msg.slots[1] = std::move(xs);
  msg.slots[2] = BytesValue::of_string("root-name");

  DeserResult placed = rig.place(msg);
  MessageValue back =
      readback_object(rig.sim.memory(), rig.sim.table(), root_id, placed.root_record);
  CHECK(struct_equal(materialize(back, rig.sim.memory(), rig.sim.table()),
                     materialize(msg, rig.sim.memory(), rig.sim.table())));
}
