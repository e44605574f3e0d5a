#pragma once

#include <cstdint>
#include <vector>

#include "rpcacc/message.hpp"
#include "rpcacc/simulation.hpp"
#include "rpcacc/wire.hpp"

namespace rpcacc {

enum class Strategy { kCpuOnly, kAccelOnly, kMemoryAffinity };

const char* strategy_name(Strategy s);

// Host CPU work counters behind the normalized-cycles plots. The memcpy
// engine runs asynchronously and costs no CPU time, which is the whole point
// of attributing large copies to it.
struct CpuCycleProxy {
  std::uint64_t bytes_copied_by_cpu = 0;
  std::uint64_t bytes_copied_by_memcpy_engine = 0;
  std::uint64_t encode_ops_on_cpu = 0;
  std::uint64_t encode_bytes_on_cpu = 0;
  std::uint64_t fields_visited = 0;

  // Scalar proxy: host CPU busy nanoseconds under the given cost model.
  double proxy_ns(const HostCostModel& m) const {
    return static_cast<double>(fields_visited) * m.field_visit_ns +
           static_cast<double>(bytes_copied_by_cpu) / m.copy_bandwidth_bytes_per_ns +
           static_cast<double>(encode_ops_on_cpu) * m.encode_op_ns +
           static_cast<double>(encode_bytes_on_cpu) * m.encode_byte_ns;
  }
};

// Host-side image produced by pre-serialization: unencoded host-resident
// values in depth-first field order, with pointer records standing in for
// accelerator-resident data.
struct PreSerializedBuffer {
  MemHandle location;  // DMA-safe host region holding the records
};

struct PreSerializeResult {
  PreSerializedBuffer buffer;
  CpuCycleProxy proxy;
  double host_ns = 0.0;
  double mmio_ns = 0.0;  // completion doorbell
};

struct SerializeMetrics {
  std::uint64_t wire_bytes = 0;
  std::uint64_t dependent_reads = 0;  // pointer-chased host reads (device side)
  CpuCycleProxy proxy;
  TxnLedger ledger_delta;
  double host_ns = 0.0;
  double device_ns = 0.0;
  double link_ns = 0.0;
  double elapsed_ns = 0.0;
};

struct SerializeResult {
  wire::Bytes wire;  // final TX arena contents
  SerializeMetrics metrics;
};

struct AccelSerializeResult {
  wire::Bytes wire;
  double device_ns = 0.0;
  double link_ns = 0.0;
  std::uint64_t dependent_reads = 0;
};

// The three serialization paths of the simulated transmit side. All of them
// produce byte-identical wire output for the same object graph; they differ
// in who touches which memory and what crosses the link.
class Serializer {
 public:
  explicit Serializer(Simulation& sim) : sim_(sim) {}

  SerializeResult serialize(const MessageValue& root, Strategy strategy);

  // Stage 1 of the collaborative path: the CPU lays out host-resident values
  // unencoded in a DMA-safe buffer, skips accelerator-resident fields, and
  // rings the doorbell.
  PreSerializeResult pre_serialize(const MessageValue& root);

  // Stage 2: the device pulls the buffer in one DMA read, encodes it 512 bits
  // per cycle, and splices in accelerator-resident data from local memory.
  AccelSerializeResult accel_serialize(const PreSerializedBuffer& buffer, std::uint16_t class_id);

 private:
  SerializeResult serialize_cpu_only(const MessageValue& root);
  SerializeResult serialize_accel_only(const MessageValue& root);
  SerializeResult serialize_memory_affinity(const MessageValue& root);

  Simulation& sim_;
};

}  // namespace rpcacc
