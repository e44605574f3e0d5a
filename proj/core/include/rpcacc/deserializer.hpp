#pragma once

#include <cstdint>
#include <vector>

#include "rpcacc/message.hpp"
#include "rpcacc/simulation.hpp"
#include "rpcacc/wire.hpp"

namespace rpcacc {

// One-shot batches every host-bound value of a request in the temp buffer
// and flushes with single DMA writes; field-by-field is the conventional
// baseline issuing one DMA write per deserialized value.
enum class DeserMode { kOneShot, kFieldByField };

struct DeserMetrics {
  std::uint64_t wire_bytes = 0;
  std::uint64_t host_value_bytes = 0;   // value bytes destined for host memory
  std::uint64_t host_field_writes = 0;  // value units written host-side
  std::uint64_t data_dma_ops = 0;       // flush / per-field write ops, dispatch excluded
  std::uint64_t flushes = 0;
  std::uint64_t accel_value_writes = 0;
  std::uint64_t accel_value_bytes = 0;
  TxnLedger ledger_delta;
  double compute_ns = 0.0;  // device-side decode time
  double link_ns = 0.0;
  double elapsed_ns = 0.0;  // compute + link, sequential semantics
  std::vector<double> link_op_costs;  // per-op costs, for overlap scheduling
};

struct DeserResult {
  MessageValue root;      // region-tagged object graph
  MemHandle root_record;  // host record delivered in the completion record
  DeserMetrics metrics;
};

// Target-aware deserialization engine. Each lane keeps its current host and
// accelerator chunk across messages and a private append-only temp buffer.
// Placement bits are read from the live schema table when the message starts.
class Deserializer {
 public:
  explicit Deserializer(Simulation& sim);

  DeserResult deserialize(wire::ByteView wire, std::uint16_t class_id, DeserMode mode,
                          std::uint32_t lane_id = 0);

  struct RegionStats {
    std::uint64_t chunks_popped = 0;
    std::uint64_t chunk_bytes_placed = 0;
    std::uint64_t large_objects = 0;
    std::uint64_t large_bytes = 0;

    // Tail waste of retired chunks; the live chunk is still filling.
    std::uint64_t wasted_bytes(std::uint64_t chunk_size) const {
      std::uint64_t allocated = chunks_popped * chunk_size;
      return allocated > chunk_bytes_placed ? allocated - chunk_bytes_placed : 0;
    }
  };

  const RegionStats& stats(Region r) const {
    return r == Region::kHost ? host_stats_ : accel_stats_;
  }

  std::uint32_t lanes() const { return static_cast<std::uint32_t>(lanes_.size()); }

 private:
  struct TempBuffer {
    std::uint32_t capacity = 4096;
    struct Pending {
      std::uint64_t dest_addr;
      std::size_t offset;
      std::uint32_t len;
    };
    std::vector<std::uint8_t> data;
    std::vector<Pending> pending;

    std::size_t used() const { return data.size(); }
    bool empty() const { return pending.empty(); }
  };

  struct Lane {
    std::uint32_t id = 0;
    // Current bump chunk per region; used == chunk_size forces a pop.
    std::uint64_t chunk[2] = {0, 0};
    std::uint64_t chunk_used[2] = {0, 0};
    TempBuffer temp;
    std::vector<std::uint16_t> schema_stack;
  };

  struct MsgContext {
    DeserMode mode = DeserMode::kOneShot;
    Lane* lane = nullptr;
    DeserMetrics metrics;
    // Pointer-slot fixups applied at dispatch time.
    struct PtrFixup {
      Region record_region;
      std::uint64_t slot_addr;
      MemHandle handle;
    };
    std::vector<PtrFixup> fixups;
  };

  std::uint64_t bump_alloc(MsgContext& ctx, Region region, std::uint64_t len);
  void host_value_write(MsgContext& ctx, std::uint64_t dest, wire::ByteView bytes);
  void accel_value_write(MsgContext& ctx, std::uint64_t dest, wire::ByteView bytes);
  void value_write(MsgContext& ctx, Region region, std::uint64_t dest, wire::ByteView bytes);
  double flush(MsgContext& ctx);
  void link_op(MsgContext& ctx, double cost);

  MessageValue parse_message(MsgContext& ctx, wire::ByteView buf, const MessageSchema& schema,
                             Region record_region, std::uint64_t record_addr, int depth);

  Simulation& sim_;
  std::vector<Lane> lanes_;
  RegionStats host_stats_;
  RegionStats accel_stats_;
  std::uint64_t dispatch_seq_ = 0;
};

}  // namespace rpcacc
