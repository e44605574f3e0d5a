#pragma once

#include "rpcacc/message.hpp"
#include "rpcacc/simulation.hpp"

namespace rpcacc {

// Identity of one dereference field of one message class plus where its
// bytes currently live. The (class, field) pair is what the placement bit
// update below keys on.
struct FieldHandle {
  std::uint16_t class_id = 0;
  std::uint32_t field_number = 0;
  MemHandle mem;
};

struct MoveResult {
  MemHandle handle;
  double elapsed_ns = 0.0;
  bool moved = false;  // false when the data was already resident
};

// Host-runtime side of the generated member functions: residency checks and
// explicit cross-link moves. A move issues one MMIO command and one DMA in
// the moving direction; when automatic field updating is enabled the same
// command also rewrites the field's placement bit in the live schema table,
// so the next message of the class is placed directly where it is consumed.
class HostRuntime {
 public:
  explicit HostRuntime(Simulation& sim) : sim_(sim) {}

  static bool is_in_acc(const MemHandle& h) { return h.region == Region::kAccel; }
  static bool is_in_acc(const BytesValue& v) { return !v.is_inline() && is_in_acc(v.handle); }

  MoveResult move_to_acc(BytesValue& slot, std::uint16_t class_id, std::uint32_t field_number);
  MoveResult move_to_cpu(BytesValue& slot, std::uint16_t class_id, std::uint32_t field_number);

  MoveResult move_to_acc(FieldHandle& handle);
  MoveResult move_to_cpu(FieldHandle& handle);

  std::uint64_t explicit_moves() const { return explicit_moves_; }
  void reset_move_count() { explicit_moves_ = 0; }

 private:
  MoveResult move_handle(MemHandle& h, Region target, std::uint16_t class_id,
                         std::uint32_t field_number);
  std::uint64_t runtime_alloc(Region region, std::uint64_t len);

  Simulation& sim_;
  std::uint64_t explicit_moves_ = 0;
  // Private bump chunk per region for relocated objects.
  std::uint64_t chunk_[2] = {0, 0};
  std::uint64_t chunk_used_[2] = {0, 0};
};

// Reads one message record graph back out of simulated memory, resolving
// slot bytes through the memory model. This is how the host runtime (and the
// oracle-equivalence tests) observe what the deserializer actually wrote.
MessageValue readback_object(const MemoryModel& mem, const SchemaTable& table,
                             std::uint16_t class_id, const MemHandle& record);

}  // namespace rpcacc
