#pragma once

#include <map>
#include <memory>
#include <string>

#include "rpcacc/interconnect.hpp"
#include "rpcacc/memory.hpp"
#include "rpcacc/schema.hpp"

namespace rpcacc {

// Host-side execution cost constants. These are the knobs behind the CPU
// cycle proxy; all of them are configurable and none change any byte-level
// result, only reported times.
struct HostCostModel {
  double copy_bandwidth_bytes_per_ns = 16.0;
  double field_visit_ns = 2.0;
  double encode_op_ns = 5.0;     // per encoded field when the CPU encodes
  double encode_byte_ns = 0.25;  // per encoded byte when the CPU encodes
  double auth_ns = 500.0;        // lightweight host kernel stub
  double compress_bytes_per_ns = 1.0;  // software fallback for offloaded kernels
};

// Accelerator clock and encode width: 512 bits per cycle at 250 MHz.
struct AccelCostModel {
  double cycle_ns = 4.0;
  std::uint32_t codec_bytes_per_cycle = 64;

  double codec_ns(std::uint64_t bytes) const {
    std::uint64_t cycles = (bytes + codec_bytes_per_cycle - 1) / codec_bytes_per_cycle;
    return static_cast<double>(cycles) * cycle_ns;
  }
};

struct DeserConfig {
  std::uint32_t lanes = 4;
  std::uint32_t temp_buffer_bytes = 4096;
};

struct CuConfig {
  std::uint32_t count = 1;
  double kernel_throughput_bytes_per_ns = 8.0;
  double reprogram_us = 100.0;
  std::uint32_t ring_entries = 64;
};

struct SimConfig {
  LinkConfig link;
  MemoryConfig memory;
  DeserConfig deser;
  HostCostModel host;
  AccelCostModel accel;
  CuConfig cu;
  std::uint32_t memcpy_threshold = 512;
  bool auto_field_update = true;
};

// Applies `link.*`, `cu.*`, `mem.*` and related keys from a flat key-value
// config onto defaults. Unknown keys are left for the caller to reject.
SimConfig sim_config_from_kv(const std::map<std::string, std::string>& kv,
                             const SimConfig& base = {});

// One simulated machine: the two memories, the link, and the live schema
// table shared by deserializers and serializers. Components receive
// references; the simulation owns state and the sequential clock.
class Simulation {
 public:
  Simulation(SimConfig cfg, SchemaTable table);

  SimConfig& config() { return cfg_; }
  const SimConfig& config() const { return cfg_; }

  MemoryModel& memory() { return mem_; }
  Interconnect& link() { return link_; }
  SchemaTable& table() { return table_; }
  const SchemaTable& table() const { return table_; }

  double now() const { return now_ns_; }
  void advance(double ns) { now_ns_ += ns; }

  // 64-byte completion records cycle through one host chunk.
  static constexpr std::uint32_t kDispatchRecordBytes = 64;
  std::uint64_t next_dispatch_slot();

 private:
  SimConfig cfg_;
  MemoryModel mem_;
  Interconnect link_;
  SchemaTable table_;
  double now_ns_ = 0.0;
  std::uint64_t dispatch_ring_base_ = 0;
  std::uint32_t dispatch_ring_slots_ = 0;
  std::uint32_t dispatch_next_ = 0;
};

}  // namespace rpcacc
