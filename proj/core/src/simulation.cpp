#include "rpcacc/simulation.hpp"

#include <stdexcept>

namespace rpcacc {

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (...) {
    throw Error(ErrorCode::kConfigError, "bad numeric value for " + key + ": '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    return std::stoull(value);
  } catch (...) {
    throw Error(ErrorCode::kConfigError, "bad integer value for " + key + ": '" + value + "'");
  }
}

}  // namespace

SimConfig sim_config_from_kv(const std::map<std::string, std::string>& kv, const SimConfig& base) {
  SimConfig cfg = base;
  // The profile seeds the link config; explicit link.* keys refine it.
  if (auto it = kv.find("link.profile"); it != kv.end()) {
    cfg.link = LinkConfig::profile(it->second);
  }
  for (const auto& [key, value] : kv) {
    if (key == "link.profile") {
      // handled above
    } else if (key == "link.latency_ns") {
      cfg.link.latency_ns = to_double(key, value);
      cfg.link.mmio_write_ns = cfg.link.latency_ns;
    } else if (key == "link.bandwidth_gbps") {
      // GB/s and bytes/ns are the same unit
      cfg.link.bandwidth_bytes_per_ns = to_double(key, value);
    } else if (key == "link.max_txn_payload") {
      cfg.link.max_txn_payload = static_cast<std::uint32_t>(to_u64(key, value));
    } else if (key == "link.per_txn_overhead_ns") {
      cfg.link.per_txn_overhead_ns = to_double(key, value);
    } else if (key == "link.mmio_write_ns") {
      cfg.link.mmio_write_ns = to_double(key, value);
    } else if (key == "cu.count") {
      cfg.cu.count = static_cast<std::uint32_t>(to_u64(key, value));
    } else if (key == "cu.kernel_throughput_bytes_per_ns") {
      cfg.cu.kernel_throughput_bytes_per_ns = to_double(key, value);
    } else if (key == "cu.reprogram_us") {
      cfg.cu.reprogram_us = to_double(key, value);
    } else if (key == "mem.chunk_size") {
      cfg.memory.chunk_size = to_u64(key, value);
    } else if (key == "mem.host_pool_bytes") {
      cfg.memory.host_pool_bytes = to_u64(key, value);
    } else if (key == "mem.accel_pool_bytes") {
      cfg.memory.accel_pool_bytes = to_u64(key, value);
    } else if (key == "mem.tlb_entries") {
      cfg.memory.tlb_entries = to_u64(key, value);
    } else if (key == "deser.lanes") {
      cfg.deser.lanes = static_cast<std::uint32_t>(to_u64(key, value));
    } else if (key == "deser.temp_buffer_bytes") {
      cfg.deser.temp_buffer_bytes = static_cast<std::uint32_t>(to_u64(key, value));
    } else if (key == "serializer.memcpy_threshold") {
      cfg.memcpy_threshold = static_cast<std::uint32_t>(to_u64(key, value));
    } else if (key == "runtime.auto_field_update") {
      cfg.auto_field_update = (value == "true" || value == "1");
    }
    // other keys belong to the workload layer and are handled there
  }
  cfg.link.validate();
  return cfg;
}

Simulation::Simulation(SimConfig cfg, SchemaTable table)
    : cfg_(cfg), mem_(cfg.memory), link_(cfg.link, mem_), table_(std::move(table)) {
  dispatch_ring_base_ = mem_.alloc_chunk(Region::kHost);
  dispatch_ring_slots_ = static_cast<std::uint32_t>(cfg_.memory.chunk_size / kDispatchRecordBytes);
}

std::uint64_t Simulation::next_dispatch_slot() {
  std::uint64_t slot = dispatch_ring_base_ + dispatch_next_ * kDispatchRecordBytes;
  dispatch_next_ = (dispatch_next_ + 1) % dispatch_ring_slots_;
  return slot;
}

}  // namespace rpcacc
