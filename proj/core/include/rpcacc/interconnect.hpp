#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rpcacc/memory.hpp"

namespace rpcacc {

// Parametric host<->accelerator link. The cost of moving `len` bytes in one
// transfer is
//
//   latency_ns + per_txn_overhead_ns * ceil(len / max_txn_payload) + len / bandwidth
//
// and the transfer occupies ceil(len / max_txn_payload) transactions (one for
// a zero-length control transfer). Latency dominates small transfers, which
// is what makes batching pay.
struct LinkConfig {
  double latency_ns = 1250.0;
  double bandwidth_bytes_per_ns = 12.8;
  double per_txn_overhead_ns = 0.0;
  double mmio_write_ns = 1250.0;
  std::uint32_t max_txn_payload = 4096;

  // Known profiles: "pcie", "upi", "onchip-70ns".
  static LinkConfig profile(std::string_view name);

  void validate() const;
};

struct LedgerEntry {
  std::uint64_t ops = 0;     // transfer requests issued
  std::uint64_t txns = 0;    // link transactions consumed
  std::uint64_t bytes = 0;
  double time_ns = 0.0;

  LedgerEntry operator-(const LedgerEntry& other) const {
    return {ops - other.ops, txns - other.txns, bytes - other.bytes, time_ns - other.time_ns};
  }
};

struct TxnLedger {
  LedgerEntry dma_read;
  LedgerEntry dma_write;
  LedgerEntry mmio_write;

  std::uint64_t total_bytes() const { return dma_read.bytes + dma_write.bytes + mmio_write.bytes; }
  std::uint64_t total_ops() const { return dma_read.ops + dma_write.ops + mmio_write.ops; }

  TxnLedger delta_since(const TxnLedger& base) const {
    return {dma_read - base.dma_read, dma_write - base.dma_write, mmio_write - base.mmio_write};
  }
};

double cost_dma(std::uint64_t len, const LinkConfig& cfg);
std::uint64_t txn_count(std::uint64_t len, const LinkConfig& cfg);

// The link between the host and the simulated accelerator. DMA ops move real
// bytes through the memory model (host side goes through the TLB; a miss adds
// one extra round trip of latency instead of faulting). Every op returns its
// elapsed simulated time; callers own the clock.
class Interconnect {
 public:
  Interconnect(LinkConfig cfg, MemoryModel& mem) : cfg_(cfg), mem_(&mem) { cfg_.validate(); }

  // Device writes into host memory at a host virtual address.
  double dma_write(std::uint64_t host_addr, std::span<const std::uint8_t> bytes);
  // Device reads host memory.
  double dma_read(std::uint64_t host_addr, std::span<std::uint8_t> out);
  std::vector<std::uint8_t> dma_read(std::uint64_t host_addr, std::uint64_t len, double& elapsed);
  // Host doorbell write to a device register; the 8-byte value is the
  // only payload that crosses.
  double mmio_write(std::uint64_t reg, std::uint64_t value);

  // Ledger/cost accounting for transfers whose memory effect the caller
  // applies itself (scatter flushes land one staged window in one transfer).
  double charge_dma_write(std::uint64_t host_addr, std::uint64_t len);
  double charge_dma_read(std::uint64_t host_addr, std::uint64_t len);

  const LinkConfig& config() const { return cfg_; }
  void set_config(const LinkConfig& cfg) {
    cfg_ = cfg;
    cfg_.validate();
  }

  const TxnLedger& ledger() const { return ledger_; }
  MemoryModel& memory() { return *mem_; }

  std::uint64_t tlb_penalties() const { return tlb_penalties_; }

 private:
  double host_translate(std::uint64_t virt, std::uint64_t& phys);

  LinkConfig cfg_;
  MemoryModel* mem_;
  TxnLedger ledger_;
  std::uint64_t tlb_penalties_ = 0;
};

}  // namespace rpcacc
