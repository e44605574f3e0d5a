#include "rpcacc/interconnect.hpp"

#include <cmath>
#include <string>

namespace rpcacc {

LinkConfig LinkConfig::profile(std::string_view name) {
  LinkConfig cfg;
  if (name == "pcie") {
    cfg.latency_ns = 1250.0;
    cfg.bandwidth_bytes_per_ns = 12.8;
  } else if (name == "upi") {
    cfg.latency_ns = 125.0;
    cfg.bandwidth_bytes_per_ns = 19.2;
  } else if (name == "onchip-70ns") {
    cfg.latency_ns = 70.0;
    cfg.bandwidth_bytes_per_ns = 64.0;
  } else if (name == "custom") {
    // caller fills the fields afterwards
  } else {
    throw Error(ErrorCode::kUnknownProfile, std::string(name));
  }
  cfg.mmio_write_ns = cfg.latency_ns;
  return cfg;
}

void LinkConfig::validate() const {
  if (latency_ns <= 0 || bandwidth_bytes_per_ns <= 0 || mmio_write_ns <= 0 ||
      max_txn_payload == 0 || per_txn_overhead_ns < 0) {
    throw Error(ErrorCode::kConfigError, "link parameters must be positive");
  }
}

std::uint64_t txn_count(std::uint64_t len, const LinkConfig& cfg) {
  if (len == 0) return 1;  // control-only transfer
  return (len + cfg.max_txn_payload - 1) / cfg.max_txn_payload;
}

double cost_dma(std::uint64_t len, const LinkConfig& cfg) {
  std::uint64_t txns = len == 0 ? 0 : (len + cfg.max_txn_payload - 1) / cfg.max_txn_payload;
  return cfg.latency_ns + cfg.per_txn_overhead_ns * static_cast<double>(txns) +
         static_cast<double>(len) / cfg.bandwidth_bytes_per_ns;
}

double Interconnect::host_translate(std::uint64_t virt, std::uint64_t& phys) {
  Tlb::Translation t = mem_->tlb().translate(virt);
  phys = t.phys;
  if (!t.hit) {
    ++tlb_penalties_;
    return cfg_.latency_ns;  // one extra round trip to walk the host table
  }
  return 0.0;
}

double Interconnect::dma_write(std::uint64_t host_addr, std::span<const std::uint8_t> bytes) {
  std::uint64_t phys = 0;
  double penalty = host_translate(host_addr, phys);
  mem_->write(Region::kHost, phys, bytes);
  double elapsed = cost_dma(bytes.size(), cfg_) + penalty;
  ledger_.dma_write.ops += 1;
  ledger_.dma_write.txns += txn_count(bytes.size(), cfg_);
  ledger_.dma_write.bytes += bytes.size();
  ledger_.dma_write.time_ns += elapsed;
  return elapsed;
}

double Interconnect::dma_read(std::uint64_t host_addr, std::span<std::uint8_t> out) {
  std::uint64_t phys = 0;
  double penalty = host_translate(host_addr, phys);
  mem_->space(Region::kHost).read(phys, out);
  double elapsed = cost_dma(out.size(), cfg_) + penalty;
  ledger_.dma_read.ops += 1;
  ledger_.dma_read.txns += txn_count(out.size(), cfg_);
  ledger_.dma_read.bytes += out.size();
  ledger_.dma_read.time_ns += elapsed;
  return elapsed;
}

std::vector<std::uint8_t> Interconnect::dma_read(std::uint64_t host_addr, std::uint64_t len,
                                                 double& elapsed) {
  std::vector<std::uint8_t> out(len);
  elapsed = dma_read(host_addr, std::span<std::uint8_t>(out));
  return out;
}

double Interconnect::charge_dma_write(std::uint64_t host_addr, std::uint64_t len) {
  std::uint64_t phys = 0;
  double penalty = host_translate(host_addr, phys);
  double elapsed = cost_dma(len, cfg_) + penalty;
  ledger_.dma_write.ops += 1;
  ledger_.dma_write.txns += txn_count(len, cfg_);
  ledger_.dma_write.bytes += len;
  ledger_.dma_write.time_ns += elapsed;
  return elapsed;
}

double Interconnect::charge_dma_read(std::uint64_t host_addr, std::uint64_t len) {
  std::uint64_t phys = 0;
  double penalty = host_translate(host_addr, phys);
  double elapsed = cost_dma(len, cfg_) + penalty;
  ledger_.dma_read.ops += 1;
  ledger_.dma_read.txns += txn_count(len, cfg_);
  ledger_.dma_read.bytes += len;
  ledger_.dma_read.time_ns += elapsed;
  return elapsed;
}

double Interconnect::mmio_write(std::uint64_t /*reg*/, std::uint64_t /*value*/) {
  double elapsed = cfg_.mmio_write_ns;
  ledger_.mmio_write.ops += 1;
  ledger_.mmio_write.txns += 1;
  ledger_.mmio_write.bytes += 8;
  ledger_.mmio_write.time_ns += elapsed;
  return elapsed;
}

}  // namespace rpcacc
